#pragma once

// Command-line front end. Every command writes one envelope
// {schema_version, command, params, constants_used, rows} as JSON or CSV.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "totlab/totlab.hpp"

namespace totlab::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

enum class Format { JSON, CSV };

/// Reals are rounded to 15 significant digits; non-finite values become null.
inline Json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

inline Json real(const std::optional<double>& v) { return v ? real(*v) : Json(nullptr); }

inline Json big(const mpz_class& v) { return v.get_str(); }

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return v.dump();
}

/// Writes the envelope. Rows are buffered unless the columns are declared up
/// front, in which case they stream (used by `range`).
class Emitter {
 public:
  Emitter(std::ostream& out, Format format, std::string command, Json params, Json constants,
          std::vector<std::string> columns = {})
      : out_(out),
        format_(format),
        command_(std::move(command)),
        params_(std::move(params)),
        constants_(std::move(constants)),
        columns_(std::move(columns)),
        streaming_(!columns_.empty()) {}

  void row(Json r) {
    if (!streaming_) {
      rows_.push_back(std::move(r));
      return;
    }
    if (!started_) begin();
    if (format_ == Format::JSON) {
      out_ << (first_row_ ? "\n" : ",\n") << r.dump();
    } else {
      write_csv_row(r);
    }
    first_row_ = false;
  }

  void finish() {
    if (!streaming_) {
      for (const auto& r : rows_) {
        for (const auto& [key, _] : r.items()) {
          if (std::find(columns_.begin(), columns_.end(), key) == columns_.end()) columns_.push_back(key);
        }
      }
      begin();
      for (const auto& r : rows_) {
        if (format_ == Format::JSON) {
          out_ << (first_row_ ? "\n" : ",\n") << r.dump();
        } else {
          write_csv_row(r);
        }
        first_row_ = false;
      }
    } else if (!started_) {
      begin();
    }
    if (format_ == Format::JSON) out_ << (first_row_ ? "" : "\n") << "]}\n";
    out_.flush();
  }

 private:
  void begin() {
    started_ = true;
    if (format_ == Format::JSON) {
      Json head;
      head["schema_version"] = kSchemaVersion;
      head["command"] = command_;
      head["params"] = params_;
      head["constants_used"] = constants_;
      std::string text = head.dump();
      text.pop_back();  // reopen the object for the rows array
      out_ << text << ",\"rows\":[";
      return;
    }
    out_ << "# schema_version=" << kSchemaVersion << "\n# command=" << command_ << "\n";
    for (const auto& [key, value] : params_.items()) out_ << "# params." << key << "=" << csv_cell(value) << "\n";
    for (const auto& [key, value] : constants_.items()) {
      out_ << "# constants_used." << key << "=" << csv_cell(value) << "\n";
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
    out_ << "\n";
  }

  void write_csv_row(const Json& r) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out_ << ',';
      if (r.contains(columns_[i])) out_ << csv_cell(r[columns_[i]]);
    }
    out_ << "\n";
  }

  std::ostream& out_;
  Format format_;
  std::string command_;
  Json params_;
  Json constants_;
  std::vector<std::string> columns_;
  bool streaming_;
  bool started_ = false;
  bool first_row_ = true;
  std::vector<Json> rows_;
};

namespace detail {

inline std::uint64_t parse_count(const std::string& text, const char* name) {
  const Rational v = parse_rational(text);
  if (v.get_den() != 1 || v < 0 || !v.get_num().fits_ulong_p()) {
    throw ArgumentError(std::string(name) + " must be a non-negative integer");
  }
  return v.get_num().get_ui();
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::vector<std::string>& parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) {
    std::size_t start = 0;
    while (true) {
      const auto comma = p.find(',', start);
      const std::string item = trim(p.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!item.empty()) out.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

inline Json regime_json(const std::optional<RegimeLabel>& r, Json& row) {
  row["regime"] = r ? Json(std::string(to_string(r->tag))) : Json(nullptr);
  row["threshold_y"] = r ? real(r->threshold_y) : Json(nullptr);
  return row;
}

}  // namespace detail

struct Settings {
  Format format = Format::JSON;
  unsigned threads = 1;
  double kappa = Constants{}.kappa;
  double epsilon = 0.01;
  std::string out_path;
};

inline Json constants_json(const Settings& s, std::optional<int> k) {
  Json j;
  j["gamma"] = std::string(Constants::gamma_digits);
  j["b0"] = std::string(Constants::meissel_mertens_digits);
  j["kappa"] = real(s.kappa);
  j["epsilon"] = real(s.epsilon);
  j["c_k"] = k ? real(RegimeConfig{}.c_k_for(*k)) : Json(nullptr);
  return j;
}

/// Runs the CLI; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Generalized totient counting, constants and verification harnesses", "totlab"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings settings;
  std::string format_text = "json";
  app.add_option("--format", format_text, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("TOTLAB_FORMAT");
  app.add_option("--threads", settings.threads, "Worker threads (0 = hardware)")->envname("TOTLAB_THREADS");
  app.add_option("--kappa", settings.kappa, "Regime constant kappa")->envname("TOTLAB_KAPPA");
  app.add_option("--epsilon", settings.epsilon, "Regime constant epsilon")->envname("TOTLAB_EPSILON");
  app.add_option("--out", settings.out_path, "Write output to this file instead of stdout");

  int k = 1;
  std::string n_text, x_text, y_text, beta_text = "0", s_max_text;
  bool brute = false, materialize = false;
  std::vector<std::string> list_args;
  std::string which, form_text = "phi", mode_text, estimator_text = "exact-a";
  double z_re = 1.0, z_im = 0.0, tol = 1e-10, s_arg = 2.0, j_arg = 1.0;
  double a_arg = 1.0, T_arg = 1000.0, b_arg = 0.5, tau_arg = 100.0, y_real = 2.0;
  int steps = 40;

  std::function<void(Emitter&)> action;
  std::string command;
  Json params = Json::object();
  std::optional<int> params_k;

  auto* phi = app.add_subcommand("phi", "Phi_k(n) for one n");
  phi->add_option("--k", k)->required();
  phi->add_option("--n", n_text)->required();
  phi->add_flag("--brute", brute, "Enumerate all n^k tuples instead of using the product formula");

  auto* range = app.add_subcommand("range", "ln(Phi_k(n)/n^k) for n = 1..x");
  range->add_option("--k", k)->required();
  range->add_option("--x", x_text)->required();
  range->add_flag("--materialize", materialize, "Also emit the exact Phi_k(n)");

  auto* count = app.add_subcommand("count", "#{n <= x : Phi_k(n)/n^beta <= y}");
  count->add_option("--k", k)->required();
  count->add_option("--beta", beta_text)->required();
  count->add_option("--x", x_text)->required();
  count->add_option("--y", y_text)->required();
  count->add_option("--form", form_text)->check(CLI::IsMember({"phi", "alpha"}));

  auto* cdf = app.add_subcommand("cdf", "Empirical distribution of Phi_k(n)/n^k");
  cdf->add_option("--k", k)->required();
  cdf->add_option("--x", x_text)->required();
  cdf->add_option("--grid", list_args, "Comma-separated values in [0, 1]")->required();

  auto* constant = app.add_subcommand("constant", "R_k(z), zeta(s), L(j, chi_1) or the minimal-order constant");
  constant->add_option("--which", which)->required()->check(CLI::IsMember({"R", "zeta", "Lchi1", "minimal"}));
  constant->add_option("--k", k);
  constant->add_option("--z", z_re, "Real part of z");
  constant->add_option("--z-im", z_im, "Imaginary part of z");
  constant->add_option("--tol", tol);
  constant->add_option("--s", s_arg);
  constant->add_option("--j", j_arg);

  auto* mertens = app.add_subcommand("mertens", "Mertens sums and products");
  mertens->add_option("--xs", list_args, "Comma-separated x values")->required();

  auto* perron = app.add_subcommand("perron", "Numerical Perron integrals");
  perron->add_option("--mode", mode_text)->required()->check(CLI::IsMember({"kernel", "count"}));
  perron->add_option("--estimator", estimator_text)->check(CLI::IsMember({"exact-a", "residue-r"}));
  perron->add_option("--k", k);
  perron->add_option("--beta", beta_text);
  perron->add_option("--x", x_text);
  perron->add_option("--y", y_text);
  perron->add_option("--a", a_arg);
  perron->add_option("--T", T_arg);
  perron->add_option("--b", b_arg);
  perron->add_option("--tau", tau_arg);
  perron->add_option("--steps", steps, "Quadrature steps per unit length");

  auto* vdist = app.add_subcommand("verify-distribution", "Exact counts against the main terms, y = alpha x");
  vdist->add_option("--k", k)->required();
  vdist->add_option("--beta", beta_text)->required();
  vdist->add_option("--x", x_text)->required();
  vdist->add_option("--alphas", list_args)->required();

  auto* vext = app.add_subcommand("verify-extremal", "Primorial ratios to the minimal-order constant");
  vext->add_option("--k", k)->required();
  vext->add_option("--smax", s_max_text)->required();

  auto* bateman = app.add_subcommand("bateman", "#{m : phi(m) <= y}");
  bateman->add_option("--y", y_text)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  settings.format = format_text == "csv" ? Format::CSV : Format::JSON;

  try {
    RegimeConfig config;
    config.kappa = settings.kappa;
    config.epsilon = settings.epsilon;
    std::vector<std::string> stream_columns;

    if (app.got_subcommand(phi)) {
      command = "phi";
      const std::uint64_t n = detail::parse_count(n_text, "n");
      if (n == 0) throw ArgumentError("n must be positive");
      params = {{"k", k}, {"n", n}, {"brute", brute}};
      params_k = k;
      action = [&, n](Emitter& em) {
        const mpz_class v = brute ? phi_k_brute(n, k) : phi_k(n, k);
        em.row({{"n", n}, {"k", k}, {"phi_k", big(v)}, {"method", brute ? "brute" : "formula"}});
      };
    } else if (app.got_subcommand(range)) {
      command = "range";
      const std::uint64_t x = detail::parse_count(x_text, "x");
      params = {{"k", k}, {"x", x}, {"materialize", materialize}};
      params_k = k;
      stream_columns = {"n", "log_ratio"};
      if (materialize) stream_columns.push_back("phi_k");
      action = [&, x](Emitter& em) {
        RangeOptions opts;
        opts.materialize = materialize;
        opts.threads = settings.threads;
        phi_k_range(x, k, [&](const TotientValue& v) {
          Json row = {{"n", v.n}, {"log_ratio", real(v.log_ratio)}};
          if (v.phi_k) row["phi_k"] = big(*v.phi_k);
          em.row(std::move(row));
        }, opts);
      };
    } else if (app.got_subcommand(count)) {
      command = "count";
      const std::uint64_t x = detail::parse_count(x_text, "x");
      const Rational beta = parse_rational(beta_text), y = parse_rational(y_text);
      params = {{"k", k}, {"beta", to_string(beta)}, {"x", x}, {"y", to_string(y)}, {"form", form_text}};
      params_k = k;
      action = [&, x, beta, y](Emitter& em) {
        CountOptions opts;
        opts.form = form_text == "alpha" ? CountForm::ALPHA : CountForm::PHI_K;
        opts.threads = settings.threads;
        const CountRecord rec = count_phi_ratio(k, beta, x, y, opts, config);
        Json row = {{"k", k}, {"beta", to_string(beta)}, {"x", x}, {"y", to_string(y)}, {"count", rec.count}};
        detail::regime_json(rec.regime, row);
        em.row(std::move(row));
      };
    } else if (app.got_subcommand(cdf)) {
      command = "cdf";
      const std::uint64_t x = detail::parse_count(x_text, "x");
      std::vector<double> grid;
      for (const auto& g : detail::split_list(list_args)) grid.push_back(parse_rational(g).get_d());
      Json grid_json = Json::array();
      for (double g : grid) grid_json.push_back(real(g));
      params = {{"k", k}, {"x", x}, {"grid", grid_json}};
      params_k = k;
      action = [&, x, grid](Emitter& em) {
        CountOptions opts;
        opts.threads = settings.threads;
        for (const auto& p : empirical_cdf(k, x, grid, opts)) {
          em.row({{"alpha", real(p.alpha)}, {"count", p.count}, {"f", real(p.fraction)}});
        }
      };
    } else if (app.got_subcommand(constant)) {
      command = "constant";
      params = {{"which", which}};
      if (which == "R") {
        params["k"] = k;
        params["z_re"] = real(z_re);
        params["z_im"] = real(z_im);
        params["tol"] = real(tol);
        params_k = k;
        action = [&](Emitter& em) {
          const auto r = r_value(k, ComplexVal(z_re, z_im), tol);
          em.row({{"which", "R"},
                  {"k", k},
                  {"z_re", real(z_re)},
                  {"z_im", real(z_im)},
                  {"value_re", real(r.value.real())},
                  {"value_im", real(r.value.imag())},
                  {"truncation_prime", r.truncation_prime},
                  {"tail_bound", real(r.tail_bound)}});
        };
      } else if (which == "zeta") {
        params["s"] = real(s_arg);
        action = [&](Emitter& em) { em.row({{"which", "zeta"}, {"s", real(s_arg)}, {"value", real(zeta_real(s_arg))}}); };
      } else if (which == "Lchi1") {
        params["j"] = real(j_arg);
        action = [&](Emitter& em) { em.row({{"which", "Lchi1"}, {"j", real(j_arg)}, {"value", real(l_chi1(j_arg))}}); };
      } else {
        params["k"] = k;
        params_k = k;
        action = [&](Emitter& em) {
          em.row({{"which", "minimal"}, {"k", k}, {"value", real(minimal_constant(k))}});
        };
      }
    } else if (app.got_subcommand(mertens)) {
      command = "mertens";
      std::vector<std::uint64_t> xs;
      Json xs_json = Json::array();
      for (const auto& s : detail::split_list(list_args)) {
        xs.push_back(detail::parse_count(s, "x"));
        xs_json.push_back(xs.back());
      }
      params = {{"xs", xs_json}};
      action = [&, xs](Emitter& em) {
        for (const auto& r : verify_mertens(xs, settings.threads)) {
          em.row({{"x", r.x},
                  {"sum", real(r.sum)},
                  {"sum_limit", real(r.sum_limit)},
                  {"sum_deviation", real(r.sum_deviation())},
                  {"product", real(r.product)},
                  {"product_scaled", real(r.product_scaled)},
                  {"product_deviation", real(r.product_deviation())},
                  {"product_power2", real(r.product_power)},
                  {"product_power2_limit", real(r.product_power_limit)},
                  {"product_power2_deviation", real(r.power_deviation())},
                  {"product_chi", real(r.product_chi)},
                  {"product_chi_limit", real(r.product_chi_limit)},
                  {"product_chi_deviation", real(r.chi_deviation())}});
        }
      };
    } else if (app.got_subcommand(perron)) {
      command = "perron";
      if (mode_text == "kernel") {
        y_real = y_text.empty() ? 2.0 : parse_rational(y_text).get_d();
        params = {{"mode", "kernel"}, {"y", real(y_real)}, {"a", real(a_arg)}, {"T", real(T_arg)}};
        action = [&](Emitter& em) {
          const auto c = perron_kernel_check(y_real, a_arg, T_arg);
          em.row({{"y", real(y_real)},
                  {"a", real(a_arg)},
                  {"T", real(T_arg)},
                  {"estimate", real(c.estimate)},
                  {"trapezoid", real(c.trapezoid)},
                  {"trapezoid_coarse", real(c.trapezoid_coarse)},
                  {"h", real(perron_step(y_real))},
                  {"bound", real(c.bound)}});
        };
      } else {
        if (x_text.empty() || y_text.empty()) throw ArgumentError("perron count needs --x and --y");
        const std::uint64_t x = detail::parse_count(x_text, "x");
        const Rational beta = parse_rational(beta_text), y = parse_rational(y_text);
        const PerronMode mode = estimator_text == "residue-r" ? PerronMode::RESIDUE_R : PerronMode::EXACT_A;
        params = {{"mode", "count"}, {"estimator", estimator_text}, {"k", k},       {"beta", to_string(beta)},
                  {"x", x},          {"y", to_string(y)},            {"b", real(b_arg)}, {"tau", real(tau_arg)},
                  {"steps", steps}};
        params_k = k;
        action = [&, x, beta, y, mode](Emitter& em) {
          PerronOptions opts;
          opts.threads = settings.threads;
          opts.kappa = settings.kappa;
          const auto e = perron_count_estimate(k, beta, x, y, b_arg, tau_arg, steps, mode, opts);
          CountOptions copts;
          copts.threads = settings.threads;
          const auto exact = count_many(k, beta, x, {y}, copts)[0];
          Json row = {{"estimate", real(e.estimate)}, {"coarse", real(e.coarse)}, {"exact_count", exact}};
          if (mode == PerronMode::RESIDUE_R) {
            row["residue_term"] = real(e.residue_term);
            row["shifted_integral"] = real(e.shifted_integral);
            row["shift_abscissa"] = real(e.shift_abscissa);
            row["truncation_prime"] = e.truncation_prime ? Json(*e.truncation_prime) : Json(nullptr);
          }
          em.row(std::move(row));
        };
      }
    } else if (app.got_subcommand(vdist)) {
      command = "verify-distribution";
      const std::uint64_t x = detail::parse_count(x_text, "x");
      const Rational beta = parse_rational(beta_text);
      std::vector<Rational> alphas;
      Json alphas_json = Json::array();
      for (const auto& a : detail::split_list(list_args)) {
        alphas.push_back(parse_rational(a));
        alphas_json.push_back(to_string(alphas.back()));
      }
      params = {{"k", k}, {"beta", to_string(beta)}, {"x", x}, {"alphas", alphas_json}};
      params_k = k;
      action = [&, x, beta, alphas](Emitter& em) {
        for (const auto& r : verify_distribution(k, beta, x, alphas, settings.threads, config)) {
          Json row = {{"k", r.params.k},
                      {"beta", to_string(r.params.beta)},
                      {"delta", to_string(r.params.delta)},
                      {"x", r.x},
                      {"alpha", to_string(r.alpha)},
                      {"y", to_string(r.y)},
                      {"exact_count", r.exact_count},
                      {"main_term", real(r.main_term)},
                      {"rel_err", real(r.rel_err)}};
          detail::regime_json(r.regime, row);
          em.row(std::move(row));
        }
      };
    } else if (app.got_subcommand(vext)) {
      command = "verify-extremal";
      const std::uint64_t s_max = detail::parse_count(s_max_text, "smax");
      params = {{"k", k}, {"smax", s_max}};
      params_k = k;
      action = [&, s_max](Emitter& em) {
        const auto report = verify_extremal(k, s_max);
        for (const auto& r : report.rows) {
          em.row({{"kind", "primorial"},
                  {"s", r.s},
                  {"p", r.p_s},
                  {"log_n_s", real(r.log_n_s)},
                  {"n_s", r.n_s ? big(*r.n_s) : Json(nullptr)},
                  {"ratio", real(r.ratio)},
                  {"lower_bound", nullptr}});
        }
        for (const auto& r : report.max_order) {
          em.row({{"kind", "max_order"},
                  {"s", nullptr},
                  {"p", r.p},
                  {"log_n_s", nullptr},
                  {"n_s", nullptr},
                  {"ratio", real(r.ratio)},
                  {"lower_bound", real(r.lower_bound)}});
        }
      };
    } else if (app.got_subcommand(bateman)) {
      command = "bateman";
      const std::uint64_t y = detail::parse_count(y_text, "y");
      params = {{"y", y}};
      action = [&, y](Emitter& em) {
        const auto r = bateman_count(y, settings.threads);
        em.row({{"y", r.y},
                {"count", r.count},
                {"ratio", real(static_cast<double>(r.count) / static_cast<double>(r.y))},
                {"cutoff", r.cutoff},
                {"certificate_min_phi", r.certificate_min_phi}});
      };
    }

    std::ofstream file;
    if (!settings.out_path.empty()) {
      file.open(settings.out_path, std::ios::binary);
      if (!file) throw ArgumentError("cannot open output file '" + settings.out_path + "'");
    }
    std::ostream& target = settings.out_path.empty() ? out : file;
    const Json constants = constants_json(settings, params_k);
    if (!stream_columns.empty()) {
      Emitter em(target, settings.format, command, params, constants, stream_columns);
      action(em);
      em.finish();
    } else {
      // Buffered so that a failure never leaves a partial envelope behind.
      std::ostringstream body;
      Emitter em(body, settings.format, command, params, constants);
      action(em);
      em.finish();
      target << body.str();
    }
    return 0;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const PrecisionError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace totlab::cli
