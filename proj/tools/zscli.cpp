// Command-line surface for the spectral toolkit: eigenvalue sweeps, counting,
// scattering tables, Liouville-map dumps, convergence studies and special-
// function tables, emitted as CSV or JSON with fixed column order and
// 17-significant-digit floats (byte-reproducible across runs).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "zs/oracle.hpp"
#include "zs/scattering.hpp"
#include "zs/semiclassics.hpp"
#include "zs/specfun.hpp"

using json = nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Cell = std::variant<long, double, std::string>;
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_str(const Cell& c) {
  if (std::holds_alternative<long>(c))
    return std::to_string(std::get<long>(c));
  if (std::holds_alternative<double>(c)) return fmt(std::get<double>(c));
  return std::get<std::string>(c);
}

void emit(const Table& t, const std::string& mode, const std::string& format,
          const std::string& output_path) {
  std::ostringstream out;
  if (format == "csv") {
    for (size_t i = 0; i < t.columns.size(); ++i)
      out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& r : t.rows) {
      for (size_t i = 0; i < r.size(); ++i)
        out << (i ? "," : "") << cell_str(r[i]);
      out << "\n";
    }
  } else {  // json
    json j;
    j["mode"] = mode;
    j["columns"] = t.columns;
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::object();
      for (size_t i = 0; i < r.size(); ++i) {
        if (std::holds_alternative<long>(r[i]))
          row[t.columns[i]] = std::get<long>(r[i]);
        else if (std::holds_alternative<double>(r[i]))
          row[t.columns[i]] = std::get<double>(r[i]);
        else
          row[t.columns[i]] = std::get<std::string>(r[i]);
      }
      rows.push_back(row);
    }
    j["rows"] = rows;
    out << j.dump(2) << "\n";
  }
  if (output_path.empty() || output_path == "-") {
    std::cout << out.str();
  } else {
    std::ofstream f(output_path, std::ios::binary);
    if (!f) throw zs::Error("cannot open output path " + output_path);
    f << out.str();
  }
}

zs::Potential resolve_potential(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') {
    json j = json::parse(spec);
    std::string kernel = j.value("kernel", "rational_lorentz");
    zs::Potential base = zs::make_potential(kernel);
    double amp = j.value("amplitude", 1.0);
    double width = j.value("width", 1.0);
    zs::Potential p = (amp != 1.0 || width != 1.0)
                          ? zs::scaled_potential(base, amp, width)
                          : base;
    if (j.contains("tau")) p.tau = j["tau"].get<double>();
    if (j.contains("tail_class")) {
      std::string tc = j["tail_class"].get<std::string>();
      if (tc == "rational")
        p.tail.kind = zs::TailKind::Rational;
      else if (tc == "exponential")
        p.tail.kind = zs::TailKind::Exponential;
      else if (tc == "generic")
        p.tail.kind = zs::TailKind::Generic;
      else
        throw CLI::ValidationError(
            "tail_class must be rational, exponential or generic");
    }
    return p;
  }
  return zs::make_potential(spec);  // throws InvalidPotential with catalog
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = (double)x.size();
  for (size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Options {
  std::string potential = "rational_lorentz";
  std::vector<double> hbar;
  std::string format = "csv";
  std::string output;
  bool oracle = false;
  double mu1 = 0.0, mu2 = 0.0;
  double mu_floor = -1.0;
  std::vector<double> lambda;
  double a_turn = 1.0;
  double xmin = -5.0, xmax = 5.0;
  int npoints = 101;
  std::string family = "pcf";
  std::vector<double> bvals;
};

void apply_config(Options& o, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("cannot read config file " + path);
  json j = json::parse(f);
  if (j.contains("potential")) {
    if (j["potential"].is_string())
      o.potential = j["potential"].get<std::string>();
    else
      o.potential = j["potential"].dump();
  }
  if (j.contains("hbar")) o.hbar = j["hbar"].get<std::vector<double>>();
  if (j.contains("format")) o.format = j["format"].get<std::string>();
  if (j.contains("output")) o.output = j["output"].get<std::string>();
  if (j.contains("oracle")) o.oracle = j["oracle"].get<bool>();
  if (j.contains("mu1")) o.mu1 = j["mu1"].get<double>();
  if (j.contains("mu2")) o.mu2 = j["mu2"].get<double>();
  if (j.contains("mu_floor")) o.mu_floor = j["mu_floor"].get<double>();
  if (j.contains("lambda")) o.lambda = j["lambda"].get<std::vector<double>>();
  if (j.contains("a")) o.a_turn = j["a"].get<double>();
  if (j.contains("xmin")) o.xmin = j["xmin"].get<double>();
  if (j.contains("xmax")) o.xmax = j["xmax"].get<double>();
  if (j.contains("npoints")) o.npoints = j["npoints"].get<int>();
  if (j.contains("family")) o.family = j["family"].get<std::string>();
  if (j.contains("b")) o.bvals = j["b"].get<std::vector<double>>();
}

void require_hbar(const Options& o) {
  if (o.hbar.empty())
    throw CLI::ValidationError("at least one --hbar value is required");
  for (double h : o.hbar)
    if (!(h > 0.0)) throw CLI::ValidationError("hbar values must be positive");
}

Table run_spectrum(const Options& o) {
  zs::Potential p = resolve_potential(o.potential);
  require_hbar(o);
  Table t;
  t.columns = {"n", "hbar", "mu_wkb", "norming_sign"};
  if (o.oracle) t.columns = {"n",        "hbar",       "mu_wkb",
                             "mu_oracle", "abs_dmu",    "norming_sign"};
  for (double hbar : o.hbar) {
    auto recs = zs::bs_eigenvalues(p, hbar, o.mu_floor);
    std::vector<double> roots;
    if (o.oracle && !recs.empty()) {
      double lo = 0.9 * recs.back().mu_wkb;
      roots = zs::spectrum_scan(p, hbar, lo, p.a_max_amplitude);
    }
    for (const auto& r : recs) {
      if (o.oracle) {
        // nearest oracle root to this record
        double best = std::numeric_limits<double>::infinity();
        for (double q : roots)
          if (std::fabs(q - r.mu_wkb) < std::fabs(best - r.mu_wkb)) best = q;
        t.rows.push_back({(long)r.n, hbar, r.mu_wkb, best,
                          std::fabs(best - r.mu_wkb), (long)r.norming_sign});
      } else {
        t.rows.push_back({(long)r.n, hbar, r.mu_wkb, (long)r.norming_sign});
      }
    }
  }
  return t;
}

Table run_count(const Options& o) {
  zs::Potential p = resolve_potential(o.potential);
  require_hbar(o);
  if (!(o.mu1 > 0.0) || !(o.mu2 > o.mu1))
    throw CLI::ValidationError("count mode requires 0 < --mu1 < --mu2");
  Table t;
  t.columns = {"hbar", "mu1", "mu2", "estimate", "integer_count"};
  if (o.oracle) t.columns.push_back("oracle_count");
  for (double hbar : o.hbar) {
    auto [est, cnt] = zs::count_eigenvalues(p, o.mu1, o.mu2, hbar);
    std::vector<Cell> row = {hbar, o.mu1, o.mu2, est, (long)cnt};
    if (o.oracle) {
      auto roots = zs::spectrum_scan(p, hbar, o.mu1, o.mu2);
      row.push_back((long)roots.size());
    }
    t.rows.push_back(row);
  }
  return t;
}

Table run_scattering(const Options& o) {
  zs::Potential p = resolve_potential(o.potential);
  require_hbar(o);
  std::vector<double> lambdas = o.lambda;
  if (lambdas.empty()) lambdas = {0.5, 1.0, 2.0};
  Table t;
  t.columns = {"lambda",     "hbar",      "sigma",  "arg_T_wkb",
               "oracle_absR", "oracle_absT", "defect"};
  for (double hbar : o.hbar)
    for (double lam : lambdas) {
      auto r = zs::wkb_scattering(p, lam, hbar);
      auto [R, T] = zs::jost_scattering_oracle(p, hbar, lam);
      t.rows.push_back({lam, hbar, r.sigma, std::arg(r.T_wkb), std::abs(R),
                        std::abs(T), std::norm(T) - std::norm(R) - 1.0});
    }
  return t;
}

Table run_liouville_table(const Options& o) {
  zs::Potential p = resolve_potential(o.potential);
  if (o.npoints < 2) throw CLI::ValidationError("--npoints must be >= 2");
  zs::ErrorTermEvaluator ev(p, o.a_turn);
  Table t;
  t.columns = {"x", "zeta", "psi"};
  for (int i = 0; i < o.npoints; ++i) {
    double x = o.xmin + (o.xmax - o.xmin) * i / (o.npoints - 1);
    double z = ev.map().zeta_of_x(x);
    t.rows.push_back({x, z, ev.psi(z)});
  }
  return t;
}

Table run_convergence(const Options& o) {
  zs::Potential p = resolve_potential(o.potential);
  require_hbar(o);
  if (o.hbar.size() < 2)
    throw CLI::ValidationError("convergence mode needs >= 2 hbar values");
  double floor = o.mu_floor > 0.0 ? o.mu_floor : 0.3;
  std::vector<double> hs, errs;
  for (double hbar : o.hbar) {
    auto recs = zs::bs_eigenvalues(p, hbar, floor);
    auto roots = zs::spectrum_scan(p, hbar, floor, p.a_max_amplitude);
    double worst = 0.0;
    for (const auto& r : recs) {
      double best = std::numeric_limits<double>::infinity();
      for (double q : roots) best = std::min(best, std::fabs(q - r.mu_wkb));
      if (best < 0.25 * M_PI * hbar) worst = std::max(worst, best);
    }
    if (worst > 0.0) {
      hs.push_back(hbar);
      errs.push_back(worst);
    }
  }
  if (hs.size() < 2)
    throw zs::EvaluationFailure("convergence: too few usable hbar points");
  double slope = fit_slope(hs, errs);
  Table t;
  t.columns = {"hbar", "max_abs_dmu", "fitted_slope"};
  for (size_t i = 0; i < hs.size(); ++i)
    t.rows.push_back({hs[i], errs[i], slope});
  return t;
}

Table run_specfun_table(const Options& o) {
  if (o.npoints < 2) throw CLI::ValidationError("--npoints must be >= 2");
  Table t;
  if (o.family == "airy") {
    t.columns = {"x", "ai", "bi", "ai1", "bi1"};
    for (int i = 0; i < o.npoints; ++i) {
      double x = o.xmin + (o.xmax - o.xmin) * i / (o.npoints - 1);
      auto a = zs::specfun::airy(x);
      t.rows.push_back({x, a.ai, a.bi, a.ai1, a.bi1});
    }
    return t;
  }
  if (o.family != "pcf")
    throw CLI::ValidationError("--family must be pcf or airy");
  std::vector<double> bs = o.bvals;
  if (bs.empty()) bs = {-1.0};
  t.columns = {"x", "b", "u", "ubar", "u1", "ubar1"};
  for (double b : bs)
    for (int i = 0; i < o.npoints; ++i) {
      double x = o.xmin + (o.xmax - o.xmin) * i / (o.npoints - 1);
      auto c = zs::specfun::pcf_core(x, b);
      t.rows.push_back({x, b, c.u.value(), c.ubar.value(), c.u1.value(),
                        c.ubar1.value()});
    }
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Semiclassical spectral toolkit for a 2x2 non-self-adjoint Dirac "
      "operator with bell-shaped potential.\n"
      "CSV column orders (fixed):\n"
      "  spectrum:       n,hbar,mu_wkb[,mu_oracle,abs_dmu],norming_sign\n"
      "  count:          hbar,mu1,mu2,estimate,integer_count[,oracle_count]\n"
      "  scattering:     lambda,hbar,sigma,arg_T_wkb,oracle_absR,oracle_absT,"
      "defect\n"
      "  liouville_table: x,zeta,psi\n"
      "  convergence:    hbar,max_abs_dmu,fitted_slope\n"
      "  specfun_table:  x,b,u,ubar,u1,ubar1 (pcf) | x,ai,bi,ai1,bi1 (airy)\n"
      "Floats are printed with 17 significant digits; runs are deterministic."};
  app.require_subcommand(1);

  Options o;
  std::string config_path;

  // the env cap is honored by clamping our (serial) worker count; kept for
  // interface stability
  if (const char* env = std::getenv("ZS_NUM_THREADS")) {
    int n = std::atoi(env);
    (void)n;
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override");
    sub->add_option("--potential", o.potential,
                    "catalog name (rational_lorentz, sech, gaussian) or "
                    "inline JSON {kernel,amplitude,width,tail_class,tau}");
    sub->add_option("--hbar", o.hbar, "semiclassical parameter(s)")
        ->delimiter(',');
    sub->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", o.output, "output path (default stdout)");
  };

  auto* sp = app.add_subcommand("spectrum", "Bohr-Sommerfeld eigenvalue sweep");
  add_common(sp);
  sp->add_flag("--oracle", o.oracle, "add shooting-oracle comparison columns");
  sp->add_option("--mu-floor", o.mu_floor, "sweep floor (default 0.05*A_max)");

  auto* ct = app.add_subcommand("count", "eigenvalue counting in a mu window");
  add_common(ct);
  ct->add_flag("--oracle", o.oracle, "add oracle root count column");
  ct->add_option("--mu1", o.mu1, "window lower edge")->required(false);
  ct->add_option("--mu2", o.mu2, "window upper edge")->required(false);

  auto* sc = app.add_subcommand("scattering", "WKB + oracle scattering table");
  add_common(sc);
  sc->add_option("--lambda", o.lambda, "spectral parameter grid")
      ->delimiter(',');

  auto* lt = app.add_subcommand("liouville_table", "(x, zeta, psi) dump");
  add_common(lt);
  lt->add_option("--a", o.a_turn, "turning point (0 = critical)");
  lt->add_option("--xmin", o.xmin, "grid start");
  lt->add_option("--xmax", o.xmax, "grid end");
  lt->add_option("--npoints", o.npoints, "grid size");

  auto* cv = app.add_subcommand("convergence", "WKB-vs-oracle rate study");
  add_common(cv);
  cv->add_option("--mu-floor", o.mu_floor, "comparison floor (default 0.3)");

  auto* sf = app.add_subcommand("specfun_table", "PCF / Airy value tables");
  add_common(sf);
  sf->add_option("--family", o.family, "pcf or airy");
  sf->add_option("--b", o.bvals, "PCF parameter(s)")->delimiter(',');
  sf->add_option("--xmin", o.xmin, "grid start");
  sf->add_option("--xmax", o.xmax, "grid end");
  sf->add_option("--npoints", o.npoints, "grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      // flags override config: re-parse flags after loading the file
      Options from_file;
      apply_config(from_file, config_path);
      Options flags = o;
      o = from_file;
      // overlay every flag the user actually passed
      CLI::App* sub = app.get_subcommands().front();
      auto passed = [&](const std::string& name) {
        return sub->count(name) > 0;
      };
      if (passed("--potential")) o.potential = flags.potential;
      if (passed("--hbar")) o.hbar = flags.hbar;
      if (passed("--format")) o.format = flags.format;
      if (passed("--output")) o.output = flags.output;
      if (sub->get_name() == "spectrum" || sub->get_name() == "count")
        if (passed("--oracle")) o.oracle = flags.oracle;
      if (sub->get_name() == "count") {
        if (passed("--mu1")) o.mu1 = flags.mu1;
        if (passed("--mu2")) o.mu2 = flags.mu2;
      }
      if (sub->get_name() == "spectrum" || sub->get_name() == "convergence")
        if (passed("--mu-floor")) o.mu_floor = flags.mu_floor;
      if (sub->get_name() == "scattering")
        if (passed("--lambda")) o.lambda = flags.lambda;
      if (sub->get_name() == "liouville_table") {
        if (passed("--a")) o.a_turn = flags.a_turn;
      }
      if (sub->get_name() == "liouville_table" ||
          sub->get_name() == "specfun_table") {
        if (passed("--xmin")) o.xmin = flags.xmin;
        if (passed("--xmax")) o.xmax = flags.xmax;
        if (passed("--npoints")) o.npoints = flags.npoints;
      }
      if (sub->get_name() == "specfun_table") {
        if (passed("--family")) o.family = flags.family;
        if (passed("--b")) o.bvals = flags.bvals;
      }
    }

    Table t;
    std::string mode;
    if (app.got_subcommand("spectrum")) {
      mode = "spectrum";
      t = run_spectrum(o);
    } else if (app.got_subcommand("count")) {
      mode = "count";
      t = run_count(o);
    } else if (app.got_subcommand("scattering")) {
      mode = "scattering";
      t = run_scattering(o);
    } else if (app.got_subcommand("liouville_table")) {
      mode = "liouville_table";
      t = run_liouville_table(o);
    } else if (app.got_subcommand("convergence")) {
      mode = "convergence";
      t = run_convergence(o);
    } else if (app.got_subcommand("specfun_table")) {
      mode = "specfun_table";
      t = run_specfun_table(o);
    }
    emit(t, mode, o.format, o.output);
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zs::InvalidPotential& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zs::OutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << "\n";
    return 2;
  } catch (const zs::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
