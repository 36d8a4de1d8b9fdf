#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cudir/empirical.hpp"
#include "cudir/error.hpp"
#include "cudir/io.hpp"
#include "cudir/model.hpp"
#include "cudir/moments.hpp"
#include "cudir/montecarlo.hpp"
#include "cudir/optimize.hpp"
#include "cudir/specfun.hpp"
#include "cudir/sphere.hpp"
#include "cudir/synthetic.hpp"

namespace cudir::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string output_dir = "cudir_out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t count = kDefaultDraws;
};

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return kFallbackSeed;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: '" + env + "'");
  return v;
}

void add_common(CLI::App* app, Common& c, bool with_count, bool with_seed = true) {
  app->add_option("--output-dir", c.output_dir, "Directory for artifacts and the run manifest");
  if (with_seed) app->add_option("--seed", c.seed, std::string("Random seed (default: $") + kSeedEnv + ")");
  if (with_count) {
    app->add_option("--threads", c.threads, "Worker threads (0 = all cores); never changes results");
    app->add_option("--count", c.count, "Number of Monte Carlo draws")->check(CLI::PositiveNumber);
  }
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string strip_at(const std::string& s) { return !s.empty() && s.front() == '@' ? s.substr(1) : s; }

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

// Records artifacts and writes the manifest that reproduces them.
class RunRecorder {
 public:
  RunRecorder(std::string command, fs::path dir, std::uint64_t seed, std::vector<std::string> argv)
      : command_(std::move(command)), dir_(std::move(dir)), seed_(seed), argv_(std::move(argv)) {}

  void write(const std::string& name, std::string_view content) {
    io::write_text_file(dir_ / name, content);
    artifacts_.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void finish(const std::vector<const CLI::App*>& apps) const {
    json params = json::object();
    for (const auto* app : apps) {
      for (const auto* opt : app->get_options()) {
        if (opt->count() == 0 || opt->get_name() == "--help" || opt->get_name() == "--output-dir") continue;
        const auto& r = opt->results();
        std::string joined;
        for (const auto& v : r) joined += (joined.empty() ? "" : ",") + v;
        params[opt->get_name()] = joined;
      }
    }
    json manifest = {{"command", command_}, {"parameters", params}, {"seed", seed_},
                     {"artifacts", artifacts_}, {"version", CUDIR_VERSION}, {"argv", argv_}};
    io::write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  std::uint64_t seed_;
  std::vector<std::string> argv_;
  std::vector<std::string> artifacts_;
};

// ---------------------------------------------------------------- moments

struct MomentsOpts {
  std::string mu;
  double sigma = 0.0;
  double rho = 0.0;
  std::string theta;
  std::optional<std::string> output_dir;
};

int cmd_moments(const MomentsOpts& o, const CLI::App* app, const std::vector<std::string>& argv, std::ostream& out) {
  const HomoscedasticModel model(io::read_number_list(o.mu), o.sigma, o.rho);
  const MomentSummary s = md_mrl_homoscedastic(model);
  json j = io::to_json(s);
  j["n"] = model.dim();
  j["concentration"] = model.concentration();
  if (!o.theta.empty()) {
    const auto raw = io::read_number_list(o.theta);
    if (raw.size() != model.dim()) throw DimensionError("--theta has the wrong length");
    const UnitDirection theta = standardize(raw);
    j["theta"] = io::to_json(theta.coords());
    j["expectation_T"] = expectation_T(theta, s);
    j["variance_T"] = variance_T_homoscedastic(theta, model);
  }
  out << j.dump(2) << '\n';
  if (o.output_dir) {
    RunRecorder rec("moments", *o.output_dir, 0, argv);
    rec.write_json("moments.json", j);
    rec.finish({app});
  }
  return kOk;
}

// --------------------------------------------------------------- simulate

struct SimulateOpts {
  Common common;
  std::string params = CUDIR_DEFAULT_PARAMS;
  std::string model = "10";
  std::string mode = "chi_mu";
  double bandwidth = 0.0;
  std::string axis = "sigma1";
  std::string factors = "0.1,1,2,5,10";
};

GaussianModel fixture_model(const io::ParameterFixture& fx, const std::string& which) {
  if (which == "10") return GaussianModel(fx.mu10, fx.sigma10);
  if (which == "10prime") return GaussianModel(fx.mu10, fx.sigma10_prime());
  if (which == "3") return GaussianModel(fx.mu3(), fx.sigma3());
  throw UsageError("--model must be 10, 10prime or 3");
}

int cmd_ic_pdf(const SimulateOpts& o, RunRecorder& rec, std::ostream& out) {
  const auto fx = io::load_parameter_fixture(strip_at(o.params));
  const GaussianModel model = fixture_model(fx, o.model);
  ThetaMode mode;
  if (o.mode == "chi_mu")
    mode = ThetaMode::chi_mu;
  else if (o.mode == "sample_md")
    mode = ThetaMode::sample_md;
  else
    throw UsageError("--mode must be chi_mu or sample_md");
  if (o.bandwidth < 0.0) throw UsageError("--bandwidth must be positive");

  auto ic = ic_distribution(model, mode, o.common.count, SeededStream{o.common.seed, 0},
                            resolve_threads(o.common.threads));
  if (o.bandwidth > 0.0) ic.density = kde(ic.values, Bandwidth::fixed(o.bandwidth));
  const auto stats = describe(ic.values);

  std::string csv = "t,density\n";
  for (std::size_t i = 0; i < ic.density.grid.size(); ++i)
    csv += csv_line({io::format_number(ic.density.grid[i]), io::format_number(ic.density.density[i])});
  rec.write("ic_pdf.csv", csv);
  const json summary = {{"mode", o.mode},
                        {"model", o.model},
                        {"count", o.common.count},
                        {"theta", io::to_json(ic.theta.coords())},
                        {"bandwidth", ic.density.bandwidth},
                        {"integral", integrate(ic.density)},
                        {"mean_T", stats.mean},
                        {"sd_T", stats.sd}};
  rec.write_json("ic_summary.json", summary);
  out << "ic-pdf: mean T " << io::format_number(stats.mean) << ", sd " << io::format_number(stats.sd)
      << ", density integral " << io::format_number(integrate(ic.density)) << '\n';
  return kOk;
}

int cmd_md_perturb(const SimulateOpts& o, RunRecorder& rec, std::ostream& out) {
  const auto fx = io::load_parameter_fixture(strip_at(o.params));
  PerturbAxis axis;
  if (o.axis == "mu1")
    axis = PerturbAxis::mu1;
  else if (o.axis == "sigma1")
    axis = PerturbAxis::sigma1;
  else
    throw UsageError("--axis must be mu1 or sigma1");
  const auto factors = io::read_number_list(o.factors);
  const auto mu = fx.mu3();
  const auto points = md_perturbation_experiment(mu, fx.sigma3(), axis, factors, o.common.count,
                                                 SeededStream{o.common.seed, 0}, resolve_threads(o.common.threads));
  std::string csv = "factor,angle_deg,mrl,md_1,md_2,md_3,chi_mu_1,chi_mu_2,chi_mu_3\n";
  for (const auto& p : points) {
    csv += csv_line({io::format_number(p.factor), io::format_number(p.angle_deg), io::format_number(p.mrl),
                     io::format_number(p.md[0]), io::format_number(p.md[1]), io::format_number(p.md[2]),
                     io::format_number(p.chi_mu[0]), io::format_number(p.chi_mu[1]),
                     io::format_number(p.chi_mu[2])});
  }
  rec.write("md_perturb.csv", csv);
  out << "md-perturb: " << points.size() << " factors along " << o.axis << '\n';
  return kOk;
}

int cmd_mrl_check(const SimulateOpts& o, RunRecorder& rec, std::ostream& out) {
  const auto fx = io::load_parameter_fixture(strip_at(o.params));
  const GaussianModel model = fixture_model(fx, o.model);
  const int order = static_cast<int>(model.dim()) - 1;

  const HomoscedasticFit exact = fit_homoscedastic(model);
  const HomoscedasticFit printed = round_fit(exact, 4);
  const double x_printed = round_to(printed.concentration(), 4);
  const double mrl_printed = specfun::varrho(order, x_printed);
  const double mrl_exact = specfun::varrho(order, exact.concentration());

  const auto mc = mc_moments(model, Projection::chi, o.common.count, SeededStream{o.common.seed, 0},
                             resolve_threads(o.common.threads));
  const json j = {
      {"model", o.model},
      {"order", order},
      {"fit", {{"centered_norm", exact.centered_norm}, {"sigma_hat", exact.sigma_hat}, {"rho_hat", exact.rho_hat},
               {"concentration", exact.concentration()}}},
      {"fit_4dp", {{"centered_norm", printed.centered_norm}, {"sigma_hat", printed.sigma_hat},
                   {"rho_hat", printed.rho_hat}, {"concentration", x_printed}}},
      {"closed_form_mrl", mrl_printed},
      {"closed_form_mrl_unrounded", mrl_exact},
      {"mc_mrl", mc.mrl},
      {"mc_mrl_se", mc.mrl_se},
      {"count", mc.count}};
  rec.write_json("mrl_check.json", j);
  out << "closed-form mrl (4 dp chain, x = " << io::format_number(x_printed)
      << "): " << io::format_number(round_to(mrl_printed, 4)) << " [" << io::format_number(mrl_printed) << "]\n"
      << "closed-form mrl (unrounded chain, x = " << io::format_number(exact.concentration())
      << "): " << io::format_number(mrl_exact) << '\n'
      << "monte carlo mrl (" << mc.count << " draws): " << io::format_number(mc.mrl) << " +/- "
      << io::format_number(mc.mrl_se) << '\n';
  return kOk;
}

// ----------------------------------------------------------------- oracle

struct OracleOpts {
  Common common;
  std::string suite = "all";
};

struct Check {
  std::string suite;
  std::string name;
  double error = 0.0;      ///< observed discrepancy
  double tolerance = 0.0;
  [[nodiscard]] bool pass() const { return std::isfinite(error) && error <= tolerance; }
};

// Statistical tolerance: four standard errors plus a 4/N floor, so small-N
// runs whose standard-error estimate is itself noisy still have headroom.
double stat_tol(double se, std::size_t n) { return 4.0 * se + 4.0 / static_cast<double>(n); }

void specfun_suite(std::vector<Check>& checks) {
  double worst = 0.0;
  for (double x : {0.001, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 45.0})
    worst = std::max(worst, std::abs(specfun::varrho(1, x) - std::erf(x / std::sqrt(2.0))));
  checks.push_back({"specfun", "varrho_1(x) = erf(x/sqrt 2)", worst, 1e-12});

  worst = 0.0;
  for (int n = 2; n <= 200; ++n)
    for (double x : {0.0, 0.05, 0.5, 1.0, 3.0, 10.0, 50.0}) {
      const double r = specfun::varrho(n, x);
      const double t = specfun::f_var(n, x) + (n - 1) * specfun::g_var(n, x) + r * r;
      worst = std::max(worst, std::abs(t - 1.0));
    }
  checks.push_back({"specfun", "f + (n-1) g + varrho^2 = 1, n = 2..200", worst, 1e-10});

  worst = 0.0;
  for (double z : {0.01, 0.5, 2.0, 8.0, 30.0}) {
    const double closed = std::sqrt(std::numbers::pi) * std::erf(std::sqrt(z)) / (2.0 * std::sqrt(z));
    worst = std::max(worst, std::abs(specfun::kummer_m(0.5, 1.5, -z) / closed - 1.0));
  }
  checks.push_back({"specfun", "M(1/2, 3/2, -z) = sqrt(pi) erf(sqrt z) / (2 sqrt z)", worst, 1e-13});

  worst = 0.0;
  for (int n : {2, 3, 10, 100}) {
    worst = std::max(worst, std::abs(specfun::f_var(n, 0.0) - 1.0 / n));
    worst = std::max(worst, std::abs(specfun::g_var(n, 0.0) - 1.0 / n));
  }
  checks.push_back({"specfun", "f_n(0) = g_n(0) = 1/n", worst, 1e-15});
}

void mc_canonical_case(std::vector<Check>& checks, int n, double x, std::size_t count, SeededStream stream,
                       unsigned threads) {
  std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
  mu[0] = x;
  const GaussianModel model(mu, Matrix::identity(static_cast<std::size_t>(n)));
  const auto mc = mc_moments(model, Projection::unitize, count, stream, threads);
  const Matrix exact = projected_cov_canonical(n, x);
  double worst_mean = 0.0, worst_cov = 0.0;
  for (int i = 0; i < n; ++i) {
    const double expect = i == 0 ? specfun::varrho(n, x) : 0.0;
    worst_mean = std::max(worst_mean, std::abs(mc.mean[i] - expect) / stat_tol(mc.mean_se[i], count));
    for (int j = 0; j < n; ++j)
      worst_cov = std::max(worst_cov, std::abs(mc.cov(i, j) - exact(i, j)) / stat_tol(mc.cov_se(i, j), count));
  }
  std::ostringstream label;
  label << "n=" << n << " x=" << x;
  checks.push_back({"cov", "mean (varrho_n, 0, ...) " + label.str(), worst_mean, 1.0});
  checks.push_back({"cov", "cov diag(f_n, g_n I) " + label.str(), worst_cov, 1.0});
}

void cov_suite(std::vector<Check>& checks, const Common& c) {
  const unsigned threads = resolve_threads(c.threads);
  const std::pair<int, double> cases[] = {{3, 1.0}, {5, 0.5}, {9, 0.1288}};
  std::uint64_t id = 1;
  for (const auto& [n, x] : cases) mc_canonical_case(checks, n, x, c.count, SeededStream{c.seed, id++ << 32}, threads);

  // Same law seen through chi, in the equicorrelated family.
  const HomoscedasticModel hm({0.3, -0.1, 0.5, 0.0, -0.4, 0.2}, 1.0, 0.3);
  const Matrix exact = cov_chi_homoscedastic(hm);
  const auto mc = mc_moments(hm.to_gaussian(), Projection::chi, c.count, SeededStream{c.seed, id++ << 32}, threads);
  double worst = 0.0;
  for (std::size_t i = 0; i < hm.dim(); ++i)
    for (std::size_t j = 0; j < hm.dim(); ++j)
      worst = std::max(worst, std::abs(mc.cov(i, j) - exact(i, j)) / stat_tol(mc.cov_se(i, j), c.count));
  checks.push_back({"cov", "cov chi(Z) equicorrelated n=6", worst, 1.0});
  const double mrl = md_mrl_homoscedastic(hm).mrl;
  checks.push_back({"cov", "mrl equicorrelated n=6", std::abs(mc.mrl - mrl) / stat_tol(mc.mrl_se, c.count), 1.0});
}

void optimize_suite(std::vector<Check>& checks, const Common& c) {
  RandomStream rng(SeededStream{c.seed, 0xA11CE});
  double worst_value = 0.0, worst_theta = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 10);
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (auto& m : mu) m = rng.next_normal();
    const double lo = -1.0 / (n - 1);
    const double rho = lo + (0.9 - lo) * (0.05 + 0.9 * rng.next_uniform());
    const HomoscedasticModel model(mu, 0.5 + 1.5 * rng.next_uniform(), rho);
    const double x = model.concentration();
    const double expect = std::min(specfun::f_var(n - 1, x), specfun::g_var(n - 1, x));
    worst_value = std::max(worst_value, std::abs(min_variance(cov_chi_homoscedastic(model)).value - expect));
    const auto a = mean_variance_homoscedastic(model, RiskAversion::finite(0.0)).theta_star;
    for (auto lambda : {RiskAversion::finite(1.0), RiskAversion::infinite()}) {
      const auto b = mean_variance_homoscedastic(model, lambda).theta_star;
      for (std::size_t i = 0; i < a.dim(); ++i) worst_theta = std::max(worst_theta, std::abs(a[i] - b[i]));
    }
  }
  checks.push_back({"optimize", "min_variance value = min(f, g), 20 models", worst_value, 1e-10});
  checks.push_back({"optimize", "mean-variance theta* independent of lambda", worst_theta, 0.0});

  // E[T] at the mean direction equals the MRL.
  const HomoscedasticModel hm({0.2, 0.0, -0.3, 0.4, 0.1}, 1.0, 0.2);
  const auto s = md_mrl_homoscedastic(hm);
  const auto mc = mc_moments(hm.to_gaussian(), Projection::chi, c.count, SeededStream{c.seed, 0xB0B},
                             resolve_threads(c.threads));
  const double t_mean = dot(s.md.coords(), mc.mean);
  const double se = std::sqrt(variance_T_homoscedastic(s.md, hm) / static_cast<double>(c.count));
  checks.push_back({"optimize", "E[T(md)] = mrl", std::abs(t_mean - s.mrl) / stat_tol(se, c.count), 1.0});
}

int cmd_oracle(const OracleOpts& o, RunRecorder& rec, std::ostream& out) {
  const std::string& s = o.suite;
  if (s != "specfun" && s != "cov" && s != "optimize" && s != "all")
    throw UsageError("--suite must be specfun, cov, optimize or all");
  std::vector<Check> checks;
  if (s == "specfun" || s == "all") specfun_suite(checks);
  if (s == "cov" || s == "all") cov_suite(checks, o.common);
  if (s == "optimize" || s == "all") optimize_suite(checks, o.common);

  bool all_pass = true;
  json rows = json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass();
    out << (c.pass() ? "PASS " : "FAIL ") << c.suite << ": " << c.name << "  error " << io::format_number(c.error)
        << " tol " << io::format_number(c.tolerance) << '\n';
    rows.push_back({{"suite", c.suite}, {"name", c.name}, {"error", c.error}, {"tolerance", c.tolerance},
                    {"pass", c.pass()}});
  }
  rec.write_json("oracle.json", {{"suite", s}, {"count", o.common.count}, {"checks", rows}, {"pass", all_pass}});
  return all_pass ? kOk : kOracleFailure;
}

// -------------------------------------------------------------- empirical

struct EmpiricalOpts {
  Common common;
  std::string input;
  std::string windows = "yearly";
  std::size_t rolling = kDefaultRollingWindow;
  std::string iota = "md";
  std::string missing = "cross_mean";
};

std::string file_label(std::string label) {
  std::replace(label.begin(), label.end(), ':', '_');
  return label;
}

int cmd_empirical(const EmpiricalOpts& o, RunRecorder& rec, std::ostream& out, std::ostream& err) {
  MissingPolicy policy;
  if (o.missing == "cross_mean")
    policy = MissingPolicy::cross_mean;
  else if (o.missing == "drop_row")
    policy = MissingPolicy::drop_row;
  else
    throw UsageError("--missing must be cross_mean or drop_row");

  const auto loaded = load_panel(strip_at(o.input), policy);
  const ReturnPanel& panel = loaded.panel;
  if (o.rolling > panel.rows())
    throw DimensionError("--rolling " + std::to_string(o.rolling) + " exceeds the " + std::to_string(panel.rows()) +
                         " panel rows");

  std::vector<Window> windows;
  if (o.windows == "yearly") {
    windows = yearly_windows(panel);
    windows.push_back(full_window(panel));
  } else if (o.windows == "full") {
    windows.push_back(full_window(panel));
  } else {
    const auto colon = o.windows.find(':');
    if (colon == std::string::npos) throw UsageError("--windows must be yearly, full or FROM:TO");
    windows.push_back(date_range_window(panel, parse_iso_date(o.windows.substr(0, colon)),
                                        parse_iso_date(o.windows.substr(colon + 1))));
  }

  std::optional<UnitDirection> iota;
  if (o.iota != "md") {
    if (o.iota.empty() || o.iota.front() != '@') throw UsageError("--iota must be md or @file");
    const auto raw = io::read_number_list(o.iota);
    if (raw.size() != panel.cols())
      throw DimensionError("--iota has " + std::to_string(raw.size()) + " entries, panel has " +
                           std::to_string(panel.cols()) + " columns");
    iota = standardize(raw);
  }

  const auto& rep = loaded.report;
  if (!rep.dropped_tickers.empty())
    err << "warning: dropped " << rep.dropped_tickers.size() << " columns with more than 10% missing\n";
  if (rep.filled_cells > 0) err << "warning: filled " << rep.filled_cells << " missing cells\n";
  if (rep.dropped_rows > 0) err << "warning: dropped " << rep.dropped_rows << " rows with missing cells\n";

  const StandardizedPanel sp = standardize_panel(panel);
  if (sp.degenerate_rows > 0) err << "warning: dropped " << sp.degenerate_rows << " constant rows\n";
  rec.write_json("panel.json", {{"rows", panel.rows()},
                                {"columns", panel.cols()},
                                {"dropped_tickers", rep.dropped_tickers},
                                {"filled_cells", rep.filled_cells},
                                {"dropped_rows", rep.dropped_rows},
                                {"degenerate_rows", sp.degenerate_rows}});

  for (const auto& w : windows) {
    const WindowReport r = window_report(window_sample(sp, w), w.label, iota);
    const std::string tag = file_label(w.label);
    rec.write_json("report_" + tag + ".json", io::to_json(r));
    std::string spectrum = "index,eigenvalue\n";
    for (std::size_t i = 0; i < r.scatter_eigenvalues.size(); ++i)
      spectrum += csv_line({std::to_string(i + 1), io::format_number(r.scatter_eigenvalues[i])});
    rec.write("spectrum_" + tag + ".csv", spectrum);
    std::string series = "date,value\n";
    const auto lo = std::lower_bound(sp.panel_rows.begin(), sp.panel_rows.end(), w.first_row) - sp.panel_rows.begin();
    for (std::size_t i = 0; i < r.projected_series.size(); ++i)
      series += csv_line({format_iso_date(panel.dates()[sp.panel_rows[static_cast<std::size_t>(lo) + i]]),
                          io::format_number(r.projected_series[i])});
    rec.write("projected_" + tag + ".csv", series);
    out << "window " << w.label << ": N " << r.projected_series.size() << ", mrl "
        << io::format_number(r.summary.mrl) << '\n';
  }

  const auto corr = correlation_summary(panel, sp);
  rec.write_json("correlation.json", {{"mean_corr_z", corr.mean_corr_z},
                                      {"sd_corr_z", corr.sd_corr_z},
                                      {"mean_corr_x", corr.mean_corr_x},
                                      {"sd_corr_x", corr.sd_corr_x}});

  if (o.rolling > 0) {
    const auto points = rolling_mrl_cssd(panel, o.rolling);
    std::string csv = "date,mrl,cssd\n";
    std::size_t undefined = 0;
    for (const auto& p : points) {
      undefined += p.mrl ? 0 : 1;
      csv += csv_line({format_iso_date(p.date), p.mrl ? io::format_number(*p.mrl) : "", io::format_number(p.cssd)});
    }
    if (undefined > 0) err << "warning: rolling mrl undefined on " << undefined << " dates\n";
    rec.write("rolling.csv", csv);
  }
  return kOk;
}

// ----------------------------------------------------------- synth-panel

struct SynthOpts {
  Common common;
  SyntheticPanelSpec spec;
};

int cmd_synth(const SynthOpts& o, RunRecorder& rec, std::ostream& out) {
  SyntheticPanelSpec spec = o.spec;
  spec.stream = SeededStream{o.common.seed, 0};
  rec.write("panel.csv", synthetic_panel_csv(spec));
  out << "wrote " << (fs::path(o.common.output_dir) / "panel.csv").string() << '\n';
  return kOk;
}

// ----------------------------------------------------------------- replay

std::vector<std::string> replay_args(const fs::path& manifest, const std::optional<std::string>& output_dir) {
  json m;
  try {
    m = json::parse(io::read_text_file(manifest));
  } catch (const json::parse_error& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw ParseError(manifest.string() + ": no argv recorded");
  auto argv = m["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw ParseError("a manifest cannot replay another replay");
  if (output_dir) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      if (argv[i] == "--output-dir") {
        ++i;
        continue;
      }
      if (argv[i].rfind("--output-dir=", 0) == 0) continue;
      kept.push_back(argv[i]);
    }
    kept.push_back("--output-dir");
    kept.push_back(*output_dir);
    argv = std::move(kept);
  }
  return argv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directional statistics of standardized cross-sectional returns", "cudir"};
  app.set_version_flag("--version", CUDIR_VERSION);
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  MomentsOpts mo;
  auto* moments = app.add_subcommand("moments", "Closed-form MD, MRL and cov(chi(Z)) in the equicorrelated model");
  moments->add_option("--mu", mo.mu, "Mean vector: comma list or @file")->required();
  moments->add_option("--sigma", mo.sigma, "Common standard deviation")->required();
  moments->add_option("--rho", mo.rho, "Common correlation")->required();
  moments->add_option("--theta", mo.theta, "Portfolio direction (standardized before use): comma list or @file");
  moments->add_option("--output-dir", mo.output_dir, "Also write moments.json and a manifest here");

  SimulateOpts so;
  so.common.seed = seed;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments on the bundled ten-asset model");
  simulate->require_subcommand(1);
  auto add_sim = [&](const char* name, const char* desc) {
    auto* sub = simulate->add_subcommand(name, desc);
    add_common(sub, so.common, true);
    sub->add_option("--params", so.params, "Parameter fixture (JSON, optionally @path)");
    return sub;
  };
  auto* ic_pdf = add_sim("ic-pdf", "Density of the information coefficient T = theta^T chi(Z)");
  ic_pdf->add_option("--model", so.model, "10, 10prime or 3");
  ic_pdf->add_option("--mode", so.mode, "chi_mu or sample_md");
  ic_pdf->add_option("--bandwidth", so.bandwidth, "Fixed kernel bandwidth (default: automatic)");
  auto* md_perturb = add_sim("md-perturb", "Mean direction of the three-asset model under perturbation");
  md_perturb->add_option("--axis", so.axis, "mu1 or sigma1");
  md_perturb->add_option("--factors", so.factors, "Scaling factors: comma list or @file");
  auto* mrl_check = add_sim("mrl-check", "Closed-form MRL approximation against simulation");
  mrl_check->add_option("--model", so.model, "10, 10prime or 3");

  OracleOpts oo;
  oo.common.seed = seed;
  auto* oracle = app.add_subcommand("oracle", "Check closed forms against independent references");
  add_common(oracle, oo.common, true);
  oracle->add_option("--suite", oo.suite, "specfun, cov, optimize or all");

  EmpiricalOpts eo;
  eo.common.seed = seed;
  auto* empirical = app.add_subcommand("empirical", "Directional analysis of a return panel");
  add_common(empirical, eo.common, false, false);
  empirical->add_option("--input", eo.input, "Panel CSV: date,<ticker>,...")->required();
  empirical->add_option("--windows", eo.windows, "yearly, full or FROM:TO (ISO dates)");
  empirical->add_option("--rolling", eo.rolling, "Rolling window length for MRL and CSSD (0 = off)");
  empirical->add_option("--iota", eo.iota, "Projection direction: md or @file");
  empirical->add_option("--missing", eo.missing, "cross_mean or drop_row");

  SynthOpts yo;
  yo.common.seed = seed;
  auto* synth = app.add_subcommand("synth-panel", "Write a synthetic one-factor return panel");
  add_common(synth, yo.common, false);
  synth->add_option("--years", yo.spec.years);
  synth->add_option("--rows-per-year", yo.spec.rows_per_year);
  synth->add_option("--cols", yo.spec.cols);
  synth->add_option("--factor-sd", yo.spec.factor_sd);
  synth->add_option("--noise-sd", yo.spec.noise_sd);
  synth->add_option("--beta-sd", yo.spec.beta_sd);
  synth->add_option("--regime-strength", yo.spec.regime_strength);
  synth->add_option("--sparse-cols", yo.spec.sparse_cols, "Columns with about 20% missing cells");
  synth->add_option("--scattered-missing", yo.spec.scattered_missing, "Missing probability elsewhere");

  std::string manifest_path;
  std::optional<std::string> replay_dir;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay->add_option("--output-dir", replay_dir, "Write to this directory instead of the recorded one");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (replay->parsed()) {
      const auto argv = replay_args(manifest_path, replay_dir);
      return run(argv, out, err);
    }
    if (moments->parsed()) return cmd_moments(mo, moments, args, out);

    auto record = [&](const std::string& command, const Common& c, const std::vector<const CLI::App*>& apps,
                      const std::function<int(RunRecorder&)>& body) {
      RunRecorder rec(command, c.output_dir, c.seed, args);
      const int code = body(rec);
      rec.finish(apps);
      return code;
    };
    if (ic_pdf->parsed())
      return record("simulate ic-pdf", so.common, {ic_pdf}, [&](RunRecorder& r) { return cmd_ic_pdf(so, r, out); });
    if (md_perturb->parsed())
      return record("simulate md-perturb", so.common, {md_perturb},
                    [&](RunRecorder& r) { return cmd_md_perturb(so, r, out); });
    if (mrl_check->parsed())
      return record("simulate mrl-check", so.common, {mrl_check},
                    [&](RunRecorder& r) { return cmd_mrl_check(so, r, out); });
    if (oracle->parsed())
      return record("oracle", oo.common, {oracle}, [&](RunRecorder& r) { return cmd_oracle(oo, r, out); });
    if (empirical->parsed())
      return record("empirical", eo.common, {empirical},
                    [&](RunRecorder& r) { return cmd_empirical(eo, r, out, err); });
    if (synth->parsed())
      return record("synth-panel", yo.common, {synth}, [&](RunRecorder& r) { return cmd_synth(yo, r, out); });
    err << app.help();
    return kUsage;
  } catch (const DegenerateInputError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const UndefinedDirectionError& e) {
    err << "error: " << e.what() << " (mrl " << io::format_number(e.mrl()) << ")\n";
    return kDegenerate;
  } catch (const NoUniqueSolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace cudir::cli
