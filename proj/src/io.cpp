#include "mgamsgd/io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "mgamsgd/reference.hpp"
#include "mgamsgd/sampling.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace mgamsgd {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'A', 'M', 'S', 'G', 'D', '1'};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  if (v != std::floor(v))
    throw ConfigError("config: " + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

TrainConfig parse_config_text(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value' on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw ConfigError("config: empty value for " + key);

    if (key == "lr_c") cfg.lr_c = parse_number(key, value);
    else if (key == "lr_f") cfg.lr_f = parse_number(key, value);
    else if (key == "N_GAi") cfg.n_gai = parse_int(key, value);
    else if (key == "N_h") cfg.n_h = parse_int(key, value);
    else if (key == "N_nh") cfg.n_nh = parse_int(key, value);
    else if (key == "P_sf") cfg.p_sf = parse_number(key, value);
    else if (key == "N_x") cfg.nx = cfg.ny = cfg.nz = parse_int(key, value);
    else if (key == "beta_i") cfg.beta_i = parse_number(key, value);
    else if (key == "M_g") cfg.m_g = parse_number(key, value);
    else if (key == "M_m") cfg.m_m = parse_number(key, value);
    else if (key == "M_l") cfg.m_l = parse_number(key, value);
    else if (key == "gamma") cfg.gamma = parse_number(key, value);
    else if (key == "E") cfg.E = parse_number(key, value);
    else if (key == "nu") cfg.nu = parse_number(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_number(key, value));
    else if (key == "case") {
      if (value != "A" && value != "B") throw ConfigError("config: case must be A or B");
      cfg.bc_case = value[0];
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

TrainConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void save_checkpoint(const std::filesystem::path& path, const Architecture& arch,
                     const Eigen::VectorXd& theta) {
  arch.validate();
  if (theta.size() != param_count(arch))
    throw CheckpointError("checkpoint: parameter count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("checkpoint: cannot open " + path.string() + " for write");
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t nh = static_cast<std::uint32_t>(arch.n_hidden);
  const std::uint32_t nnh = static_cast<std::uint32_t>(arch.n_neurons);
  out.write(reinterpret_cast<const char*>(&nh), 4);
  out.write(reinterpret_cast<const char*>(&nnh), 4);
  out.write(reinterpret_cast<const char*>(theta.data()),
            static_cast<std::streamsize>(theta.size() * sizeof(double)));
  if (!out) throw CheckpointError("checkpoint: write failed for " + path.string());
}

std::pair<Architecture, Eigen::VectorXd> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError("checkpoint: bad magic in " + path.string());
  std::uint32_t nh = 0;
  std::uint32_t nnh = 0;
  if (!in.read(reinterpret_cast<char*>(&nh), 4) || !in.read(reinterpret_cast<char*>(&nnh), 4))
    throw CheckpointError("checkpoint: truncated header in " + path.string());
  Architecture arch;
  arch.n_hidden = static_cast<int>(nh);
  arch.n_neurons = static_cast<int>(nnh);
  try {
    arch.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  const int count = param_count(arch);
  Eigen::VectorXd theta(count);
  if (!in.read(reinterpret_cast<char*>(theta.data()),
               static_cast<std::streamsize>(count * sizeof(double))))
    throw CheckpointError("checkpoint: truncated parameters in " + path.string());
  char extra;
  if (in.read(&extra, 1))
    throw CheckpointError("checkpoint: trailing bytes in " + path.string());
  return {arch, std::move(theta)};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void render_report(const RunReport& r, std::ostream& os) {
  os << "run report\n";
  os << "==========\n\n";
  os << "config:\n";
  os << "  case      = " << r.config.bc_case << "\n";
  os << "  E         = " << format_number(r.config.E) << "\n";
  os << "  nu        = " << format_number(r.config.nu) << "\n";
  os << "  N_h       = " << r.config.n_h << "\n";
  os << "  N_nh      = " << r.config.n_nh << "\n";
  os << "  N_x/y/z   = " << r.config.nx << " " << r.config.ny << " " << r.config.nz << "\n";
  os << "  beta_i    = " << format_number(r.config.beta_i) << "\n";
  os << "  lr_c      = " << format_number(r.config.lr_c) << "\n";
  os << "  lr_f      = " << format_number(r.config.lr_f) << "\n";
  os << "  N_GAi     = " << r.config.n_gai << "\n";
  os << "  P_sf      = " << format_number(r.config.p_sf) << "\n";
  os << "  M_g/m/l   = " << format_number(r.config.m_g) << " " << format_number(r.config.m_m)
     << " " << format_number(r.config.m_l) << "\n";
  os << "  gamma     = " << format_number(r.effective_gamma) << "\n";
  os << "  seed      = " << r.effective_seed << "\n\n";

  os << "trace:\n";
  os << "  MSE_i          = " << format_number(r.trace.mse_i) << "\n";
  os << "  MSE_after_MGA  = " << format_number(r.trace.mse_after_mga) << "\n";
  os << "  MSE_min        = " << format_number(r.trace.mse_min) << "\n";
  os << "  generations    = " << r.trace.generations.size() << " (accepted "
     << r.trace.accepted_count() << ")\n";
  os << "  mga_time_s     = " << format_number(r.mga_seconds) << "\n";
  os << "  fsgd_time_s    = " << format_number(r.fsgd_seconds) << "\n";
  os << "  total_time_s   = " << format_number(r.trace.total_seconds) << "\n\n";

  os << "final loss breakdown:\n";
  os << "  mse_e  = " << format_number(r.final_breakdown.mse_e) << "\n";
  os << "  mse_d  = " << format_number(r.final_breakdown.mse_d) << "\n";
  os << "  mse_n  = " << format_number(r.final_breakdown.mse_n) << "\n";
  os << "  mse_uq = " << format_number(r.final_breakdown.mse_uq) << "\n";
  os << "  mse    = " << format_number(r.final_breakdown.mse) << "\n";
  if (r.mse_u_value)
    os << "\nmse_u vs analytic = " << format_number(*r.mse_u_value) << "\n";
}

void write_loss_curve_csv(const std::filesystem::path& path,
                          const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for write");
  out << "iteration,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << i << "," << format_number(losses[i]) << "\n";
}

void write_field_csv(const std::filesystem::path& path, const Architecture& arch,
                     const Eigen::VectorXd& theta, int grid_n, bool with_error,
                     const Material& mat, double traction_p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for write");
  const NetworkParams params = unflatten(theta, arch);
  const AnalyticUniaxial exact = analytic_uniaxial(mat, traction_p);
  out << "x,y,z,ux,uy,uz";
  if (with_error) out << ",eux,euy,euz";
  out << "\n";
  for (const auto& p : cube_lattice(grid_n)) {
    const Eigen::Vector3d u = forward(params, arch, p);
    out << format_number(p.x()) << "," << format_number(p.y()) << ","
        << format_number(p.z()) << "," << format_number(u.x()) << ","
        << format_number(u.y()) << "," << format_number(u.z());
    if (with_error) {
      const Eigen::Vector3d e = u - exact(p);
      out << "," << format_number(e.x()) << "," << format_number(e.y()) << ","
          << format_number(e.z());
    }
    out << "\n";
  }
}

void write_compare_csv(const std::filesystem::path& path,
                       const std::vector<CompareMethodResult>& results,
                       std::size_t max_points_per_run) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for write");
  out << "method,seed,time_s,loss\n";
  for (const auto& r : results) {
    if (r.failed) continue;
    const std::size_t stride = std::max<std::size_t>(1, r.curve.size() / max_points_per_run);
    for (std::size_t i = 0; i < r.curve.size(); i += stride)
      out << r.method << "," << r.seed << "," << format_number(r.curve[i].first) << ","
          << format_number(r.curve[i].second) << "\n";
    if (!r.curve.empty() && (r.curve.size() - 1) % stride != 0)
      out << r.method << "," << r.seed << "," << format_number(r.curve.back().first) << ","
          << format_number(r.curve.back().second) << "\n";
  }
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void write_compare_summary(const std::filesystem::path& path,
                           const std::vector<CompareMethodResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for write");
  out << "method,runs,failed,median_final_loss\n";
  for (const std::string method : {"mga_msgd", "sgd", "adam"}) {
    std::vector<double> finals;
    int failed = 0;
    for (const auto& r : results) {
      if (r.method != method) continue;
      if (r.failed)
        ++failed;
      else
        finals.push_back(r.final_loss);
    }
    out << method << "," << finals.size() << "," << failed << ",";
    out << (finals.empty() ? "nan" : format_number(median(finals))) << "\n";
  }
}

void write_sensitivity_csv(const std::filesystem::path& path,
                           const SensitivityResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for write");
  out << "param,metric,mu,sigma\n";
  for (const auto& p : result.params)
    for (std::size_t m = 0; m < kMetricNames.size(); ++m)
      out << p.name << "," << kMetricNames[m] << "," << format_number(p.mu[m]) << ","
          << format_number(p.sigma[m]) << "\n";
}

}  // namespace mgamsgd
