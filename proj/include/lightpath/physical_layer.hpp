#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "lightpath/topology.hpp"

namespace lightpath {

// Fixed-grid WDM line system. Channel width equals symbol rate (Nyquist
// pulses), and the grid fills the modulated bandwidth exactly.
struct TransmissionConfig {
  double symbol_rate_gbaud = 100.0;
  double channel_width_ghz = 100.0;
  int channel_count = 100;
  double total_bandwidth_thz = 10.0;

  // Builds a consistent config for `channels` channels of `width_ghz` each.
  static TransmissionConfig ForChannels(int channels, double width_ghz = 100.0);

  // Throws ValidationError if the invariants above do not hold.
  void Validate() const;
};

// Incoherent GN model coefficients, all from config. Each link is split into
// amplified spans; at optimum launch power the per-span NSR is
// (27/4 * eta * G_ase^2)^(1/3) and NSRs add over spans and links.
struct ClosedFormGnParams {
  double span_length_km = 100.0;
  double attenuation_db_per_km = 0.2;
  double noise_figure_db = 4.5;
  double nonlinear_coefficient_per_w_km = 1.2;
  double dispersion_ps2_per_km = 21.7;  // |beta_2|
  double wavelength_nm = 1550.0;
  double total_bandwidth_thz = 10.0;
  enum class SpanRounding { kCeil, kFloor, kExact } span_rounding = SpanRounding::kCeil;

  double SpanCount(double link_length_km) const;
  double SpanNsr() const;
};

class NsrModel {
 public:
  struct TableDriven {
    std::map<LinkId, double> link_nsr;
  };
  struct PerKm {
    double nsr_per_km;
  };
  using Variant = std::variant<TableDriven, PerKm, ClosedFormGnParams>;

  explicit NsrModel(Variant model) : model_(std::move(model)) {}

  static NsrModel Table(std::map<LinkId, double> link_nsr) { return NsrModel(TableDriven{std::move(link_nsr)}); }
  static NsrModel UniformPerKm(double nsr_per_km) { return NsrModel(PerKm{nsr_per_km}); }
  static NsrModel ClosedForm(ClosedFormGnParams params) { return NsrModel(params); }

  // Throws ValidationError if the link has no strictly positive finite NSR.
  double LinkNsr(const Topology& topology, LinkId link) const;

  // Checks every link of the topology.
  void Validate(const Topology& topology) const;

  const Variant& model() const { return model_; }

 private:
  Variant model_;
};

// {"links": [{"a","b","nsr"}...]}, {"per_km_nsr": x} or {"closed_form_gn": {...}}.
NsrModel ParseNsrModel(std::string_view json_text, const Topology& topology);
NsrModel LoadNsrModel(const std::filesystem::path& file, const Topology& topology);

// Shannon capacity 2 * R_s * log2(1 + 1 / sum(NSR_i)) in Gbps.
double CapacityFromNsr(double total_nsr, const TransmissionConfig& config);
double PathCapacity(const Topology& topology, std::span<const LinkId> links, const NsrModel& nsr,
                    const TransmissionConfig& config);

// floor(capacity / request_size). Throws std::invalid_argument for request_size <= 0.
int MaxServices(double capacity_gbps, double request_size_gbps);

}  // namespace lightpath
