#include "lightpath/physical_layer.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lightpath {

namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kSpeedOfLight = 299792458.0;

bool PositiveFinite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

TransmissionConfig TransmissionConfig::ForChannels(int channels, double width_ghz) {
  TransmissionConfig c;
  c.symbol_rate_gbaud = width_ghz;
  c.channel_width_ghz = width_ghz;
  c.channel_count = channels;
  c.total_bandwidth_thz = channels * width_ghz / 1000.0;
  return c;
}

void TransmissionConfig::Validate() const {
  if (channel_count < 1) throw ValidationError("channel count must be >= 1");
  if (!PositiveFinite(symbol_rate_gbaud) || !PositiveFinite(channel_width_ghz)) {
    throw ValidationError("symbol rate and channel width must be positive");
  }
  if (std::abs(channel_width_ghz - symbol_rate_gbaud) > 1e-9 * channel_width_ghz) {
    throw ValidationError("channel width must equal symbol rate");
  }
  const double grid_thz = channel_count * channel_width_ghz / 1000.0;
  if (std::abs(grid_thz - total_bandwidth_thz) > 1e-9 * std::max(1.0, total_bandwidth_thz)) {
    throw ValidationError("channel count x channel width must equal total bandwidth");
  }
}

double ClosedFormGnParams::SpanCount(double link_length_km) const {
  const double spans = link_length_km / span_length_km;
  switch (span_rounding) {
    case SpanRounding::kCeil:
      return std::ceil(spans - 1e-9);
    case SpanRounding::kFloor:
      return std::max(1.0, std::floor(spans + 1e-9));
    case SpanRounding::kExact:
      break;
  }
  return spans;
}

double ClosedFormGnParams::SpanNsr() const {
  const double alpha = attenuation_db_per_km / (10.0 * std::log10(std::numbers::e)) / 1e3;  // 1/m, power
  const double span_m = span_length_km * 1e3;
  const double effective_length = (1.0 - std::exp(-alpha * span_m)) / alpha;
  const double asymptotic_length = 1.0 / alpha;
  const double gamma = nonlinear_coefficient_per_w_km * 1e-3;  // 1/(W m)
  const double beta2 = dispersion_ps2_per_km * 1e-27;          // s^2/m
  const double bandwidth = total_bandwidth_thz * 1e12;
  const double photon = kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
  const double noise_figure = std::pow(10.0, noise_figure_db / 10.0);

  // ASE PSD from one amplifier compensating the span loss.
  const double ase_psd = (std::exp(alpha * span_m) - 1.0) * noise_figure * photon;
  // NLI PSD coefficient (G_nli = eta * G^3) for a fully loaded flat spectrum.
  const double eta = 8.0 / 27.0 * gamma * gamma * effective_length * effective_length *
                     std::asinh(std::numbers::pi * std::numbers::pi / 2.0 * beta2 * asymptotic_length * bandwidth * bandwidth) /
                     (std::numbers::pi * beta2 * asymptotic_length);
  return std::cbrt(27.0 / 4.0 * eta * ase_psd * ase_psd);
}

double NsrModel::LinkNsr(const Topology& topology, LinkId link) const {
  if (link >= topology.link_count()) throw ValidationError("NSR requested for unknown link");
  const double nsr = std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TableDriven>) {
          auto it = m.link_nsr.find(link);
          if (it == m.link_nsr.end()) {
            const Link& l = topology.link(link);
            throw ValidationError("no NSR defined for link " + topology.name(l.a) + "-" + topology.name(l.b));
          }
          return it->second;
        } else if constexpr (std::is_same_v<T, PerKm>) {
          return m.nsr_per_km * topology.link(link).length_km;
        } else {
          return m.SpanCount(topology.link(link).length_km) * m.SpanNsr();
        }
      },
      model_);
  if (!PositiveFinite(nsr)) throw ValidationError("NSR for link " + std::to_string(link) + " is not positive and finite");
  return nsr;
}

void NsrModel::Validate(const Topology& topology) const {
  for (LinkId id = 0; id < topology.link_count(); ++id) LinkNsr(topology, id);
}

NsrModel ParseNsrModel(std::string_view json_text, const Topology& topology) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("NSR file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("NSR file: expected a JSON object");
  std::optional<NsrModel> model;
  try {
    if (doc.contains("links")) {
      std::map<LinkId, double> table;
      for (const auto& entry : doc.at("links")) {
        const auto a = topology.find(entry.at("a").get<std::string>());
        const auto b = topology.find(entry.at("b").get<std::string>());
        if (!a || !b) throw ValidationError("NSR file: unknown node in link entry");
        const auto link = topology.link_between(*a, *b);
        if (!link) throw ValidationError("NSR file: no link between " + topology.name(*a) + " and " + topology.name(*b));
        table[*link] = entry.at("nsr").get<double>();
      }
      model = NsrModel::Table(std::move(table));
    } else if (doc.contains("per_km_nsr")) {
      model = NsrModel::UniformPerKm(doc.at("per_km_nsr").get<double>());
    } else if (doc.contains("closed_form_gn")) {
      const auto& g = doc.at("closed_form_gn");
      ClosedFormGnParams p;
      p.span_length_km = g.value("span_length_km", p.span_length_km);
      p.attenuation_db_per_km = g.value("attenuation_db_per_km", p.attenuation_db_per_km);
      p.noise_figure_db = g.value("noise_figure_db", p.noise_figure_db);
      p.nonlinear_coefficient_per_w_km = g.value("nonlinear_coefficient_per_w_km", p.nonlinear_coefficient_per_w_km);
      p.dispersion_ps2_per_km = g.value("dispersion_ps2_per_km", p.dispersion_ps2_per_km);
      p.wavelength_nm = g.value("wavelength_nm", p.wavelength_nm);
      p.total_bandwidth_thz = g.value("total_bandwidth_thz", p.total_bandwidth_thz);
      const std::string rounding = g.value("span_rounding", std::string("ceil"));
      if (rounding == "ceil") {
        p.span_rounding = ClosedFormGnParams::SpanRounding::kCeil;
      } else if (rounding == "floor") {
        p.span_rounding = ClosedFormGnParams::SpanRounding::kFloor;
      } else if (rounding == "exact") {
        p.span_rounding = ClosedFormGnParams::SpanRounding::kExact;
      } else {
        throw ParseError("NSR file: span_rounding must be ceil|floor|exact");
      }
      model = NsrModel::ClosedForm(p);
    } else {
      throw ParseError("NSR file: expected \"links\", \"per_km_nsr\" or \"closed_form_gn\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("NSR file: ") + e.what());
  }
  model->Validate(topology);
  return *model;
}

NsrModel LoadNsrModel(const std::filesystem::path& file, const Topology& topology) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open NSR file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseNsrModel(buffer.str(), topology);
}

double CapacityFromNsr(double total_nsr, const TransmissionConfig& config) {
  return 2.0 * config.symbol_rate_gbaud * std::log2(1.0 + 1.0 / total_nsr);
}

double PathCapacity(const Topology& topology, std::span<const LinkId> links, const NsrModel& nsr,
                    const TransmissionConfig& config) {
  if (links.empty()) throw std::invalid_argument("PathCapacity: empty path");
  double total = 0.0;
  for (LinkId id : links) total += nsr.LinkNsr(topology, id);
  return CapacityFromNsr(total, config);
}

int MaxServices(double capacity_gbps, double request_size_gbps) {
  if (!(request_size_gbps > 0.0)) throw std::invalid_argument("MaxServices: request size must be positive");
  if (!(capacity_gbps > 0.0)) return 0;
  return static_cast<int>(std::floor(capacity_gbps / request_size_gbps));
}

}  // namespace lightpath
