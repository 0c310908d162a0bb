#include "lightpath/harness/training_curve.hpp"

#include <iomanip>
#include <stdexcept>

#include "lightpath/harness/csv.hpp"

namespace lightpath::harness {

namespace {

const char* const kHeader =
    "update,env_steps,episodes,mean_accepted,std_accepted,mean_reward,policy_loss,value_loss,entropy,clip_fraction,"
    "approx_kl,learning_rate,grad_norm";

}  // namespace

TrainingLogWriter::TrainingLogWriter(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  out_.open(dir / kTrainingLogName);
  if (!out_) throw std::runtime_error("cannot write " + (dir / kTrainingLogName).string());
  out_ << kHeader << std::endl << std::setprecision(10);
}

void TrainingLogWriter::Append(const agent::UpdateLog& log) {
  const auto& d = log.diagnostics;
  out_ << log.update << ',' << log.env_steps << ',' << log.episode_accepted.size() << ',' << log.mean_accepted << ','
       << log.std_accepted << ',' << log.mean_reward << ',' << d.loss.policy_loss << ',' << d.loss.value_loss << ','
       << d.loss.entropy << ',' << d.loss.clip_fraction << ',' << d.loss.approx_kl << ',' << d.learning_rate << ','
       << d.grad_norm << '\n';
  out_.flush();
}

std::vector<CurvePoint> ReadTrainingLog(const std::filesystem::path& dir) {
  const auto path = dir / kTrainingLogName;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing training log " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("corrupt training log header in " + path.string());
  std::vector<CurvePoint> points;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    try {
      if (f.size() != 13) throw std::invalid_argument("field count");
      CurvePoint p;
      p.update = std::stoll(f[0]);
      p.env_steps = std::stoll(f[1]);
      p.episodes = std::stoi(f[2]);
      p.mean_accepted = std::stod(f[3]);
      p.std_accepted = std::stod(f[4]);
      p.mean_reward = std::stod(f[5]);
      points.push_back(p);
    } catch (const std::exception&) {
      throw std::runtime_error("corrupt training log " + path.string() + " at line " + std::to_string(line_no));
    }
  }
  if (points.empty()) throw std::runtime_error("training log " + path.string() + " has no updates");
  return points;
}

CurveSeries CurveFromLog(const std::vector<CurvePoint>& points) {
  CurveSeries s;
  for (const CurvePoint& p : points) {
    if (p.episodes == 0) continue;
    s.x.push_back(static_cast<double>(p.env_steps));
    s.mean.push_back(p.mean_accepted);
    s.std.push_back(p.std_accepted);
  }
  return s;
}

CurveSeries TrainingCurve(const std::filesystem::path& dir, std::optional<double> baseline, const std::string& baseline_label) {
  const CurveSeries s = CurveFromLog(ReadTrainingLog(dir));
  if (s.x.empty()) throw std::runtime_error("no episode finished during training; nothing to plot");
  std::ofstream out(dir / "curve.csv");
  if (!out) throw std::runtime_error("cannot write curve.csv");
  out << "env_steps,mean_accepted,std_accepted" << (baseline ? ",baseline" : "") << '\n' << std::setprecision(10);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    out << static_cast<long long>(s.x[i]) << ',' << s.mean[i] << ',' << s.std[i];
    if (baseline) out << ',' << *baseline;
    out << '\n';
  }
  WriteCurveSvg(dir / "curve.svg", s, baseline, baseline_label, "Training curve");
  return s;
}

}  // namespace lightpath::harness
