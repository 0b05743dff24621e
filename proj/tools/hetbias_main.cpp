// hetbias: exact finite-sample bias toolkit for the scaled
// squared-residual family of slope-variance estimators.
//
// Subcommands: bias-curve, figure1-data, minimax, table1, audit,
// validate.  Every command is deterministic given its full flag set;
// machine outputs are CSV (17 significant digits, '#' metadata
// prelude) or JSON (alphabetical keys).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hetbias/csv.hpp"
#include "hetbias/errors.hpp"
#include "hetbias/experiments.hpp"
#include "hetbias/inference.hpp"
#include "hetbias/minimax.hpp"
#include "hetbias/numeric.hpp"
#include "hetbias/regressor.hpp"
#include "hetbias/validation.hpp"

namespace {

using hetbias::format_double;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// Flag-combination problems found after CLI11 parsing; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

Eigen::Index require_integer(double v, const char* what) {
  const double r = std::round(v);
  if (!(std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) || r < 0) {
    throw UsageError(std::string(what) + " must be a nonnegative integer, got " +
                     fmt_g(v));
  }
  return static_cast<Eigen::Index>(r);
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hetbias::InvalidInput("cannot write output file: " + out_path);
  out << text;
}

// ---------------------------------------------------------------------------
// regressor sources

struct SourceOpts {
  std::vector<double> three_point;  // T M
  std::vector<double> generate;     // T SKEW KURT [SEED]
  std::string csv_path;
  std::string csv_col;
  bool asymptotic = false;
};

void add_source_flags(CLI::App* cmd, SourceOpts& src, bool allow_asymptotic) {
  auto* tp = cmd->add_option("--three-point", src.three_point,
                             "T M: three-level sequence -M/0/+M (T/(2M^2) "
                             "entries at each of -M and +M)")
                 ->expected(2);
  auto* gen = cmd->add_option("--generate", src.generate,
                              "T SKEW KURT [SEED]: seeded sequence with these "
                              "exact sample moments")
                  ->expected(3, 4);
  auto* csv = cmd->add_option("--csv", src.csv_path,
                              "CSV file to read the regressor from");
  auto* col = cmd->add_option("--col", src.csv_col, "column name in --csv");
  csv->needs(col);
  col->needs(csv);
  tp->excludes(gen)->excludes(csv);
  gen->excludes(csv);
  if (allow_asymptotic) {
    auto* an = cmd->add_flag("--asymptotic-normal", src.asymptotic,
                             "limiting normal-regressor curves instead of a "
                             "finite sequence");
    an->excludes(tp)->excludes(gen)->excludes(csv);
  }
}

int source_count(const SourceOpts& src) {
  return (src.three_point.empty() ? 0 : 1) + (src.generate.empty() ? 0 : 1) +
         (src.csv_path.empty() ? 0 : 1) + (src.asymptotic ? 1 : 0);
}

// If T/(2m^2) is within 1e-6 of an integer count, snap m to the exact
// value sqrt(T/(2k)) so truncated decimal spellings of irrational
// levels (1.4142136, 1.7320508, ...) are accepted. The library itself
// stays strict.
double snap_three_point_m(Eigen::Index t, double m_req) {
  double k = std::round(static_cast<double>(t) / (2.0 * m_req * m_req));
  k = std::min(std::max(k, 1.0), std::floor(static_cast<double>(t) / 2.0));
  const double m_exact = std::sqrt(static_cast<double>(t) / (2.0 * k));
  if (std::abs(m_exact - m_req) <= 1e-6 * std::max(1.0, std::abs(m_req))) {
    return m_exact;
  }
  throw UsageError("--three-point: m=" + fmt_g(m_req) +
                   " does not give an integer level count at T=" +
                   std::to_string(t) + "; nearest valid m is " +
                   format_double(m_exact));
}

struct ResolvedSource {
  hetbias::RegressorSequence reg;
  std::uint64_t seed = 0;  // seed actually used
  std::vector<std::pair<std::string, std::string>> meta;  // ordered
  json config = json::object();
};

ResolvedSource resolve_source(const SourceOpts& src, std::uint64_t seed) {
  ResolvedSource r;
  r.seed = seed;
  if (!src.three_point.empty()) {
    const Eigen::Index t = require_integer(src.three_point[0], "--three-point T");
    const double m_req = src.three_point[1];
    if (!(m_req > 0.0)) throw UsageError("--three-point M must be positive");
    const double m = snap_three_point_m(t, m_req);
    r.reg = hetbias::three_point_sequence(t, m);
    r.meta = {{"source", "three-point"},
              {"t", std::to_string(t)},
              {"m", format_double(m)},
              {"m_requested", format_double(m_req)}};
    r.config = {{"kind", "three-point"},
                {"m", m},
                {"m_requested", m_req},
                {"t", t}};
  } else if (!src.generate.empty()) {
    const Eigen::Index t = require_integer(src.generate[0], "--generate T");
    const double skew = src.generate[1];
    const double kurt = src.generate[2];
    if (src.generate.size() == 4) {
      r.seed = static_cast<std::uint64_t>(
          require_integer(src.generate[3], "--generate SEED"));
    }
    r.reg = hetbias::generate_with_moments(t, {skew, kurt, 1e-8}, r.seed);
    r.meta = {{"source", "generate"},
              {"t", std::to_string(t)},
              {"skewness_target", format_double(skew)},
              {"kurtosis_target", format_double(kurt)}};
    r.config = {{"kind", "generate"},
                {"kurtosis_target", kurt},
                {"skewness_target", skew},
                {"t", t}};
  } else if (!src.csv_path.empty()) {
    const hetbias::CsvTable table = hetbias::parse_csv_file(src.csv_path);
    r.reg = hetbias::standardize(hetbias::numeric_column(table, src.csv_col));
    r.meta = {{"source", "csv"},
              {"path", src.csv_path},
              {"column", src.csv_col},
              {"t", std::to_string(r.reg.t_count)}};
    r.config = {{"column", src.csv_col},
                {"kind", "csv"},
                {"path", src.csv_path},
                {"t", r.reg.t_count}};
  } else {
    throw UsageError(
        "pick a regressor source: --three-point | --generate | --csv/--col");
  }
  return r;
}

// ---------------------------------------------------------------------------
// bias-curve / figure1-data

struct CurveOpts {
  SourceOpts src;
  double a_min = 0.0;
  double a_max = 8.0;
  long a_steps = 161;
  double u = 1.0;
  std::string normalization = "t-over-u";
  std::uint64_t seed = 0;
  std::string out;
};

void add_curve_flags(CLI::App* cmd, CurveOpts& o, std::uint64_t default_seed) {
  o.seed = default_seed;
  cmd->add_option("--a-min", o.a_min, "grid start")->capture_default_str();
  cmd->add_option("--a-max", o.a_max, "grid end")->capture_default_str();
  cmd->add_option("--a-steps", o.a_steps, "number of grid points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--u", o.u, "variance upper bound U")->capture_default_str();
  cmd->add_option("--normalization", o.normalization,
                  "bias scaling for output values")
      ->check(CLI::IsMember({"raw", "t2s2-over-u", "t-over-u"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for --generate (overrides HETBIAS_SEED)")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "write output here instead of stdout");
}

void run_curve(const std::string& command, const CurveOpts& o,
               bool norm_given) {
  if (!(o.a_min >= 0.0) || !(o.a_max >= o.a_min)) {
    throw UsageError("need 0 <= --a-min <= --a-max");
  }
  if (!(o.u > 0.0)) throw UsageError("--u must be positive");
  const hetbias::Normalization norm =
      hetbias::parse_normalization(o.normalization);

  hetbias::CsvTable table;
  table.header = {"a", "b_plus", "b_minus", "marker"};
  auto meta = [&table](const std::string& k, const std::string& v) {
    table.prelude.push_back("# " + k + "=" + v);
  };
  meta("command", command);
  meta("version", kVersion);

  const long steps = o.a_steps;
  const double step_w =
      steps > 1 ? (o.a_max - o.a_min) / static_cast<double>(steps - 1) : 0.0;

  double a_star = 0.0;
  std::vector<std::array<std::string, 3>> grid_rows(steps);
  std::array<std::string, 3> star_row;

  if (o.src.asymptotic) {
    if (norm_given && norm != hetbias::Normalization::TOverU) {
      throw UsageError(
          "limiting normal-regressor curves exist only in t-over-u units");
    }
    meta("source", "asymptotic-normal");
    meta("seed", std::to_string(o.seed));
    meta("u", format_double(o.u));
    meta("normalization", "t-over-u");
    meta("a_min", format_double(o.a_min));
    meta("a_max", format_double(o.a_max));
    meta("a_steps", std::to_string(steps));
    for (long i = 0; i < steps; ++i) {
      const double a = o.a_min + static_cast<double>(i) * step_w;
      const hetbias::AsymptoticBiases b = hetbias::normal_asymptotic_biases(a);
      grid_rows[i] = {format_double(a), format_double(b.b_plus),
                      format_double(-b.minus_b_minus)};
    }
    a_star = 4.0;
    const hetbias::AsymptoticBiases bs = hetbias::normal_asymptotic_biases(a_star);
    star_row = {format_double(a_star), format_double(bs.b_plus),
                format_double(-bs.minus_b_minus)};
    meta("a_star", format_double(a_star));
  } else {
    ResolvedSource rs = resolve_source(o.src, o.seed);
    for (const auto& kv : rs.meta) meta(kv.first, kv.second);
    meta("seed", std::to_string(rs.seed));
    meta("u", format_double(o.u));
    meta("normalization", o.normalization);
    meta("a_min", format_double(o.a_min));
    meta("a_max", format_double(o.a_max));
    meta("a_steps", std::to_string(steps));
    const hetbias::BiasProfile prof =
        hetbias::bias_profile(rs.reg, o.u, o.a_min, o.a_max, steps, norm);
    for (long i = 0; i < steps; ++i) {
      grid_rows[i] = {format_double(prof.a_grid[i]),
                      format_double(prof.b_plus[i]),
                      format_double(prof.b_minus[i])};
    }
    a_star = hetbias::minimax_a_numeric(rs.reg, o.u);
    const double bp = hetbias::apply_normalization(
        hetbias::worst_case_positive(a_star, rs.reg, o.u).value, norm,
        rs.reg.t_count, rs.reg.s_squared, o.u);
    const double bm = hetbias::apply_normalization(
        hetbias::worst_case_negative(a_star, rs.reg, o.u).value, norm,
        rs.reg.t_count, rs.reg.s_squared, o.u);
    star_row = {format_double(a_star), format_double(bp), format_double(bm)};
    double a_ana = std::numeric_limits<double>::quiet_NaN();
    try {
      a_ana = hetbias::a_star_analytic(rs.reg.kurtosis, rs.reg.t_count);
    } catch (const hetbias::DegenerateSampleSize&) {
    }
    meta("s_squared", format_double(rs.reg.s_squared));
    meta("skewness", format_double(rs.reg.skewness));
    meta("kurtosis", format_double(rs.reg.kurtosis));
    meta("a_star_numeric", format_double(a_star));
    meta("a_star_analytic", format_double(a_ana));
  }

  bool inserted = false;
  for (long i = 0; i < steps; ++i) {
    const double a = o.a_min + static_cast<double>(i) * step_w;
    if (!inserted && a > a_star) {
      table.rows.push_back(
          {star_row[0], star_row[1], star_row[2], "a_star"});
      inserted = true;
    }
    table.rows.push_back({grid_rows[i][0], grid_rows[i][1], grid_rows[i][2], ""});
  }
  if (!inserted) {
    table.rows.push_back({star_row[0], star_row[1], star_row[2], "a_star"});
  }

  write_output(hetbias::emit_csv(table), o.out);
}

// ---------------------------------------------------------------------------
// minimax

struct MinimaxOpts {
  SourceOpts src;
  double u = 1.0;
  std::string normalization = "t-over-u";
  std::uint64_t seed = 0;
  std::string out;
};

void run_minimax(const MinimaxOpts& o) {
  if (!(o.u > 0.0)) throw UsageError("--u must be positive");
  const hetbias::Normalization norm =
      hetbias::parse_normalization(o.normalization);
  ResolvedSource rs = resolve_source(o.src, o.seed);

  const double a_num = hetbias::minimax_a_numeric(rs.reg, o.u);
  double a_ana = std::numeric_limits<double>::quiet_NaN();
  try {
    a_ana = hetbias::a_star_analytic(rs.reg.kurtosis, rs.reg.t_count);
  } catch (const hetbias::DegenerateSampleSize&) {
  }
  const double bp = hetbias::apply_normalization(
      hetbias::worst_case_positive(a_num, rs.reg, o.u).value, norm,
      rs.reg.t_count, rs.reg.s_squared, o.u);
  const double bm = hetbias::apply_normalization(
      hetbias::worst_case_negative(a_num, rs.reg, o.u).value, norm,
      rs.reg.t_count, rs.reg.s_squared, o.u);

  json envelope = {
      {"command", "minimax"},
      {"config",
       {{"normalization", o.normalization},
        {"seed", rs.seed},
        {"source", rs.config},
        {"u", o.u}}},
      {"result",
       {{"a_star_analytic", a_ana},
        {"a_star_numeric", a_num},
        {"agreement", std::abs(a_num - a_ana)},
        {"b_minus_at_star", bm},
        {"b_plus_at_star", bp},
        {"kurtosis", rs.reg.kurtosis},
        {"s_squared", rs.reg.s_squared},
        {"skewness", rs.reg.skewness},
        {"t", rs.reg.t_count}}},
      {"version", kVersion}};
  write_output(envelope.dump(2) + "\n", o.out);
}

// ---------------------------------------------------------------------------
// table1

struct TableOpts {
  long t = 100;
  int samples = 6;
  std::vector<double> kurtosis = {3.0, 4.0};
  std::vector<double> skewness = {0.0, 1.0};
  double u = 1.0;
  std::string normalization = "t-over-u";
  std::uint64_t seed = 0;
  std::string out;
};

void run_table1(const TableOpts& o) {
  if (!(o.u > 0.0)) throw UsageError("--u must be positive");
  if (o.kurtosis.empty() || o.skewness.empty()) {
    throw UsageError("need at least one --kurtosis and one --skewness target");
  }
  const hetbias::Normalization norm =
      hetbias::parse_normalization(o.normalization);

  hetbias::ExperimentConfig cfg;
  cfg.t_count = o.t;
  cfg.kurtosis_targets = o.kurtosis;
  cfg.skewness_targets = o.skewness;
  cfg.samples_per_cell = o.samples;
  cfg.seed = o.seed;
  cfg.bound_u = o.u;
  const std::vector<hetbias::InvarianceRow> rows =
      hetbias::run_invariance_study(cfg);

  hetbias::CsvTable table;
  auto meta = [&table](const std::string& k, const std::string& v) {
    table.prelude.push_back("# " + k + "=" + v);
  };
  meta("command", "table1");
  meta("version", kVersion);
  meta("t", std::to_string(o.t));
  meta("samples", std::to_string(o.samples));
  meta("seed", std::to_string(o.seed));
  meta("u", format_double(o.u));
  meta("normalization", o.normalization);
  {
    std::string ks, ss;
    for (std::size_t i = 0; i < o.kurtosis.size(); ++i) {
      ks += (i ? "," : "") + fmt_g(o.kurtosis[i]);
    }
    for (std::size_t i = 0; i < o.skewness.size(); ++i) {
      ss += (i ? "," : "") + fmt_g(o.skewness[i]);
    }
    meta("kurtosis_targets", ks);
    meta("skewness_targets", ss);
  }
  for (const double k : o.kurtosis) {
    double a_ana = std::numeric_limits<double>::quiet_NaN();
    try {
      a_ana = hetbias::a_star_analytic(k, o.t);
    } catch (const hetbias::DegenerateSampleSize&) {
    }
    meta("a_star_analytic_K" + fmt_g(k), format_double(a_ana));
  }

  table.header = {"sample"};
  for (const double k : o.kurtosis) {
    for (const double s : o.skewness) {
      const std::string cell = "_K" + fmt_g(k) + "_S" + fmt_g(s);
      table.header.push_back("a_star" + cell);
      table.header.push_back("mb" + cell);
    }
  }

  const std::size_t cells = o.kurtosis.size() * o.skewness.size();
  int failed = 0;
  for (int sample = 0; sample < o.samples; ++sample) {
    std::vector<std::string> row;
    row.push_back(std::to_string(sample + 1));
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const hetbias::InvarianceRow& r =
          rows[cell * static_cast<std::size_t>(o.samples) +
               static_cast<std::size_t>(sample)];
      if (r.failed) ++failed;
      row.push_back(format_double(r.a_star_numeric));
      const double mb =
          r.failed ? std::numeric_limits<double>::quiet_NaN()
                   : hetbias::apply_normalization(r.max_bias_raw, norm, o.t,
                                                  r.s_squared, o.u);
      row.push_back(format_double(mb));
    }
    table.rows.push_back(std::move(row));
  }
  if (failed > 0) meta("failed_samples", std::to_string(failed));

  write_output(hetbias::emit_csv(table), o.out);
}

// ---------------------------------------------------------------------------
// audit

struct AuditOpts {
  std::string csv_path;
  std::string y_col;
  std::string x_col;
  std::vector<std::string> controls;
  double u = 0.0;
  bool u_given = false;
  bool as_json = false;
  std::string out;
};

json report_json(const hetbias::HccmeReport& rep) {
  json entries = json::array();
  for (const hetbias::HccmeEntry& e : rep.entries) {
    entries.push_back({{"a", e.a},
                       {"label", e.label},
                       {"std_error", e.std_error},
                       {"variance_estimate", e.variance_estimate}});
  }
  json j = {{"a_star_used", rep.a_star_used},
            {"beta1", rep.beta1},
            {"beta2", rep.beta2},
            {"degenerate_fallback", rep.degenerate_fallback},
            {"entries", entries},
            {"interval_high", rep.interval_high},
            {"interval_low", rep.interval_low},
            {"kurtosis", rep.kurtosis_used},
            {"s_squared", rep.s_squared},
            {"significant", rep.significant},
            {"t", rep.t_count}};
  if (rep.worst_case_bias_bound) {
    j["worst_case_bias_bound"] = *rep.worst_case_bias_bound;
  } else {
    j["worst_case_bias_bound"] = nullptr;
  }
  return j;
}

void print_report_human(std::string& out, const hetbias::HccmeReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "T = %lld   s^2 = %s   regressor kurtosis = %s\n",
                static_cast<long long>(rep.t_count),
                fmt4(rep.s_squared).c_str(), fmt4(rep.kurtosis_used).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "fit: y = %s + %s x\n",
                fmt4(rep.beta1).c_str(), fmt4(rep.beta2).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-18s %10s %14s %14s\n", "estimator", "a",
                "variance", "std error");
  out += buf;
  for (const hetbias::HccmeEntry& e : rep.entries) {
    std::snprintf(buf, sizeof(buf), "%-18s %10s %14s %14s\n", e.label.c_str(),
                  fmt4(e.a).c_str(), fmt4(e.variance_estimate).c_str(),
                  fmt4(e.std_error).c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "worst-case interval for beta2: [%s, %s]   significant: %s\n",
                fmt4(rep.interval_low).c_str(), fmt4(rep.interval_high).c_str(),
                rep.significant ? "yes" : "no");
  out += buf;
  std::snprintf(buf, sizeof(buf), "a* (finite-sample) = %s%s\n",
                fmt4(rep.a_star_used).c_str(),
                rep.degenerate_fallback ? "  [fallback K+1: T too small]" : "");
  out += buf;
  if (rep.worst_case_bias_bound) {
    std::snprintf(buf, sizeof(buf), "worst-case bias bound at a*: %s\n",
                  fmt4(*rep.worst_case_bias_bound).c_str());
    out += buf;
  }
}

void run_audit(const AuditOpts& o) {
  const hetbias::CsvTable table = hetbias::parse_csv_file(o.csv_path);
  hetbias::RegressionDataset data;
  data.y = hetbias::numeric_column(table, o.y_col);
  data.x = hetbias::numeric_column(table, o.x_col);
  data.w_columns.resize(data.y.size(),
                        static_cast<Eigen::Index>(o.controls.size()));
  for (std::size_t i = 0; i < o.controls.size(); ++i) {
    data.w_columns.col(static_cast<Eigen::Index>(i)) =
        hetbias::numeric_column(table, o.controls[i]);
  }
  std::optional<double> u_bound;
  if (o.u_given) {
    if (!(o.u > 0.0)) throw UsageError("--u must be positive");
    u_bound = o.u;
  }

  json config = {{"controls", o.controls},
                 {"csv", o.csv_path},
                 {"u", o.u_given ? json(o.u) : json(nullptr)},
                 {"x", o.x_col},
                 {"y", o.y_col}};

  if (o.controls.empty()) {
    const hetbias::HccmeReport rep = hetbias::hccme_report(data, u_bound);
    if (o.as_json) {
      json envelope = {{"command", "audit"},
                       {"config", config},
                       {"result", report_json(rep)},
                       {"version", kVersion}};
      write_output(envelope.dump(2) + "\n", o.out);
    } else {
      std::string text;
      print_report_human(text, rep);
      write_output(text, o.out);
    }
    return;
  }

  const hetbias::ScreeningResult sr = hetbias::screening(data, u_bound);
  if (o.as_json) {
    json result = {{"step1", report_json(sr.step1)},
                   {"step2", sr.step2 ? report_json(*sr.step2) : json(nullptr)},
                   {"verdict", hetbias::screening_verdict_name(sr.verdict)}};
    json envelope = {{"command", "audit"},
                     {"config", config},
                     {"result", result},
                     {"version", kVersion}};
    write_output(envelope.dump(2) + "\n", o.out);
  } else {
    std::string text = "step 1: y on x\n";
    print_report_human(text, sr.step1);
    if (sr.step2) {
      text += "step 2: control-purged y on x\n";
      print_report_human(text, *sr.step2);
    }
    text += "screening verdict: " +
            hetbias::screening_verdict_name(sr.verdict) + "\n";
    write_output(text, o.out);
  }
}

// ---------------------------------------------------------------------------
// validate

int run_validate(int reps, std::uint64_t seed, const std::string& out) {
  const std::vector<hetbias::ValidationCheck> checks =
      hetbias::run_validation(reps, seed);
  std::string text;
  int passed = 0;
  for (const hetbias::ValidationCheck& c : checks) {
    text += (c.pass ? "[PASS] " : "[FAIL] ") + c.name + " — " + c.detail + "\n";
    if (c.pass) ++passed;
  }
  text += std::to_string(passed) + "/" + std::to_string(checks.size()) +
          " checks passed\n";
  write_output(text, out);
  return passed == static_cast<int>(checks.size()) ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t env_seed = 0;
  if (const char* env = std::getenv("HETBIAS_SEED")) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || errno == ERANGE) {
      std::fprintf(stderr, "error: HETBIAS_SEED is not an integer: %s\n", env);
      return 2;
    }
    env_seed = v;
  }

  CLI::App app{
      "Exact finite-sample bias analysis for the scaled squared-residual "
      "family of OLS slope-variance estimators."};
  app.require_subcommand(1);
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  2  usage error (bad flags, bad grid, unknown normalization)\n"
      "  3  data error (missing file, unknown column, non-numeric or empty\n"
      "     cell, constant regressor, too-short sample, rank-deficient\n"
      "     controls)\n"
      "  4  numerical failure (moment matching failed, no bisection bracket,\n"
      "     failed self-checks)\n"
      "Environment: HETBIAS_SEED supplies the seed when --seed is absent.");

  CurveOpts curve;
  auto* c_curve = app.add_subcommand(
      "bias-curve", "worst-case positive/negative bias curves over an a-grid");
  add_source_flags(c_curve, curve.src, /*allow_asymptotic=*/true);
  add_curve_flags(c_curve, curve, env_seed);

  CurveOpts fig;
  auto* c_fig = app.add_subcommand(
      "figure1-data",
      "limiting normal-regressor curves (alias of bias-curve "
      "--asymptotic-normal)");
  add_curve_flags(c_fig, fig, env_seed);
  fig.src.asymptotic = true;

  MinimaxOpts mm;
  auto* c_mm = app.add_subcommand(
      "minimax", "numeric and closed-form minimax scale a* for a sequence");
  add_source_flags(c_mm, mm.src, /*allow_asymptotic=*/false);
  mm.seed = env_seed;
  c_mm->add_option("--u", mm.u, "variance upper bound U")->capture_default_str();
  c_mm->add_option("--normalization", mm.normalization,
                   "bias scaling for b_plus/b_minus at a*")
      ->check(CLI::IsMember({"raw", "t2s2-over-u", "t-over-u"}))
      ->capture_default_str();
  c_mm->add_option("--seed", mm.seed,
                   "seed for --generate (overrides HETBIAS_SEED)")
      ->capture_default_str();
  c_mm->add_option("--out", mm.out, "write output here instead of stdout");

  TableOpts tbl;
  tbl.seed = env_seed;
  auto* c_tbl = app.add_subcommand(
      "table1",
      "per-sample a* and maximum bias across generated moment cells");
  c_tbl->add_option("--t", tbl.t, "sample size")
      ->check(CLI::Range(3L, 100000000L))
      ->capture_default_str();
  c_tbl->add_option("--samples", tbl.samples, "sequences per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_tbl->add_option("--kurtosis", tbl.kurtosis, "kurtosis targets")
      ->delimiter(',')
      ->capture_default_str();
  c_tbl->add_option("--skewness", tbl.skewness, "skewness targets")
      ->delimiter(',')
      ->capture_default_str();
  c_tbl->add_option("--u", tbl.u, "variance upper bound U")
      ->capture_default_str();
  c_tbl->add_option("--normalization", tbl.normalization,
                    "bias scaling for the mb columns")
      ->check(CLI::IsMember({"raw", "t2s2-over-u", "t-over-u"}))
      ->capture_default_str();
  c_tbl->add_option("--seed", tbl.seed, "master seed (overrides HETBIAS_SEED)")
      ->capture_default_str();
  c_tbl->add_option("--out", tbl.out, "write output here instead of stdout");

  AuditOpts audit;
  auto* c_audit = app.add_subcommand(
      "audit", "variance estimates and worst-case interval for a dataset");
  c_audit->add_option("--csv", audit.csv_path, "input CSV file")->required();
  c_audit->add_option("--y", audit.y_col, "response column")->required();
  c_audit->add_option("--x", audit.x_col, "regressor column")->required();
  c_audit->add_option("--controls", audit.controls,
                      "comma-separated control columns (enables screening)")
      ->delimiter(',');
  auto* u_opt = c_audit->add_option(
      "--u", audit.u, "variance upper bound U for the bias bound");
  c_audit->add_flag("--json", audit.as_json, "emit JSON instead of a table");
  c_audit->add_option("--out", audit.out, "write output here instead of stdout");

  int reps = 20000;
  std::uint64_t val_seed = env_seed;
  std::string val_out;
  auto* c_val = app.add_subcommand(
      "validate", "run the internal oracle self-checks and report pass/fail");
  c_val->add_option("--reps", reps, "Monte Carlo replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_val->add_option("--seed", val_seed, "seed (overrides HETBIAS_SEED)")
      ->capture_default_str();
  c_val->add_option("--out", val_out, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_curve) {
      if (source_count(curve.src) != 1) {
        throw UsageError(
            "pick exactly one source: --three-point | --generate | --csv | "
            "--asymptotic-normal");
      }
      run_curve("bias-curve", curve, c_curve->count("--normalization") > 0);
    } else if (*c_fig) {
      run_curve("figure1-data", fig, c_fig->count("--normalization") > 0);
    } else if (*c_mm) {
      if (source_count(mm.src) != 1) {
        throw UsageError(
            "pick exactly one source: --three-point | --generate | --csv");
      }
      run_minimax(mm);
    } else if (*c_tbl) {
      run_table1(tbl);
    } else if (*c_audit) {
      audit.u_given = u_opt->count() > 0;
      run_audit(audit);
    } else if (*c_val) {
      return run_validate(reps, val_seed, val_out);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hetbias::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const hetbias::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
