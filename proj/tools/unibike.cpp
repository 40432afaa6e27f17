// Command-line driver for the unibike experiments.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <unibike.hpp>

namespace fs = std::filesystem;
using namespace unibike;

namespace {

double env_or(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return parse_angle(v);
  } catch (const DomainError&) {
    throw DomainError(std::string("environment variable ") + name + " is not a number: " + v);
  }
}

OdeConfig default_ode() {
  OdeConfig c;
  c.abs_tol = env_or("UNIBIKE_ABS_TOL", c.abs_tol);
  c.rel_tol = env_or("UNIBIKE_REL_TOL", c.rel_tol);
  c.max_step = env_or("UNIBIKE_MAX_STEP", c.max_step);
  return c;
}

// Angle-valued option stored as text and parsed after CLI11 is done.
struct AngleOpt {
  std::string text;
  double value() const { return parse_angle(text); }
};

CLI::Option* add_angle(CLI::App* app, const std::string& name, AngleOpt& a, const std::string& help) {
  return app->add_option(name, a.text, help + " (radians, or e.g. 60pi, pi/200)")->capture_default_str();
}

struct OdeFlags {
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  std::string max_step;
  std::string scalar_mode = "binary64";

  void attach(CLI::App* app, const OdeConfig& d) {
    abs_tol = d.abs_tol;
    rel_tol = d.rel_tol;
    max_step = format_angle(d.max_step);
    app->add_option("--abs-tol", abs_tol, "ODE absolute tolerance [env UNIBIKE_ABS_TOL]")->capture_default_str();
    app->add_option("--rel-tol", rel_tol, "ODE relative tolerance [env UNIBIKE_REL_TOL]")->capture_default_str();
    app->add_option("--max-step", max_step, "ODE step cap [env UNIBIKE_MAX_STEP]")->capture_default_str();
    app->add_option("--scalar-mode", scalar_mode, "binary64 or compensated")
        ->check(CLI::IsMember({"binary64", "compensated"}))
        ->capture_default_str();
  }
  OdeConfig config() const {
    OdeConfig c;
    c.abs_tol = abs_tol;
    c.rel_tol = rel_tol;
    c.max_step = parse_angle(max_step);
    c.scalar_mode = scalar_mode == "compensated" ? ScalarMode::compensated : ScalarMode::binary64;
    c.validate();
    return c;
  }
  nlohmann::json echo() const {
    return {{"abs_tol", abs_tol}, {"rel_tol", rel_tol}, {"max_step", max_step}, {"scalar_mode", scalar_mode}};
  }
};

void print_csv(const CsvTable& t, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << t.str();
  } else {
    write_csv(t, path);
  }
}

PolarSeedCurve seed_curve(const std::string& family, double domain_max) {
  return make_seed(seed_family_from_string(family), {two_pi, domain_max});
}

std::vector<double> grid_from(const std::vector<std::string>& at, const AngleOpt& from, const AngleOpt& to,
                              const AngleOpt& step) {
  if (!at.empty()) {
    std::vector<double> g;
    for (const auto& a : at) g.push_back(parse_angle(a));
    std::sort(g.begin(), g.end());
    return g;
  }
  return uniform_grid(from.value(), to.value(), step.value());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unibike curves: seeds, rear-track iteration, error profiles, bounds and models"};
  app.require_subcommand(1);
  app.footer(
      "Angles accept radians or multiples of pi (60pi, 0.5pi, pi/200).\n"
      "Environment: UNIBIKE_ABS_TOL, UNIBIKE_REL_TOL, UNIBIKE_MAX_STEP override ODE defaults.\n"
      "Exit codes: 0 ok, 2 usage, 3 numeric failure, 4 I/O.");

  OdeConfig ode_default;
  try {
    ode_default = default_ode();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }

  // seed
  auto* seed = app.add_subcommand("seed", "sample a seed spiral into a track file");
  std::string seed_family = "F";
  AngleOpt seed_max{"60pi"}, seed_spacing{"pi/200"};
  std::string seed_out, seed_csv;
  seed->add_option("--family", seed_family, "F, G, K or H")->capture_default_str();
  add_angle(seed, "--domain-max", seed_max, "last knot angle");
  add_angle(seed, "--spacing", seed_spacing, "knot spacing");
  seed->add_option("--out", seed_out, "track file")->required();
  seed->add_option("--csv", seed_csv, "also write theta, r, dr_dtheta");

  // iterate
  auto* it = app.add_subcommand("iterate", "build F_2 ... F_N by repeated rear-track solves");
  std::string it_seed = "F", it_from, it_dir = ".", it_report;
  int it_n = 2;
  AngleOpt it_domain{"60pi"}, it_spacing{"pi/200"}, it_reserve{"2.5pi"}, it_pstep{"pi/8"}, it_pmax{"60pi"};
  bool it_all = false;
  OdeFlags it_ode;
  it->add_option("--seed", it_seed, "seed family F, G, K or H")->capture_default_str();
  it->add_option("--from-track", it_from, "start from a track file instead of a seed");
  it->add_option("--n", it_n, "last iterate index N")->capture_default_str()->check(CLI::Range(1, 100000));
  add_angle(it, "--domain-max", it_domain, "seed domain end");
  add_angle(it, "--knot-spacing", it_spacing, "polar knot spacing");
  add_angle(it, "--reserve", it_reserve, "domain lost per iteration");
  add_angle(it, "--profile-step", it_pstep, "error profile spacing");
  add_angle(it, "--profile-max", it_pmax, "error profile end");
  it->add_option("--out-dir", it_dir, "directory for tracks and tables")->capture_default_str();
  it->add_flag("--save-all", it_all, "write every track, not just F_N");
  it->add_option("--report", it_report, "run report JSON (default <out-dir>/report.json)");
  it_ode.attach(it, ode_default);

  // error
  auto* er = app.add_subcommand("error", "unibike error of a track or seed");
  std::string er_track, er_seed, er_csv;
  std::vector<std::string> er_at;
  AngleOpt er_from{"2pi"}, er_to{"40pi"}, er_step{"pi/8"};
  bool er_log = false;
  er->add_option("track", er_track, "track file");
  er->add_option("--seed", er_seed, "analytic seed family instead of a file");
  er->add_option("--at", er_at, "evaluation angle(s)");
  add_angle(er, "--from", er_from, "grid start");
  add_angle(er, "--to", er_to, "grid end");
  add_angle(er, "--step", er_step, "grid step");
  er->add_option("--csv", er_csv, "write the profile to this file (default stdout)");
  er->add_flag("--log", er_log, "log10 columns");

  // bounds
  auto* bd = app.add_subcommand("bounds", "polar square root bound tables");
  std::string bd_table = "theorem1", bd_csv;
  AngleOpt bd_from{"8pi"}, bd_to{"128pi"};
  int bd_count = 50;
  bd->add_option("--table", bd_table, "theorem1, fig10, theorem2, side or crude")
      ->check(CLI::IsMember({"theorem1", "fig10", "theorem2", "side", "crude"}))
      ->capture_default_str();
  add_angle(bd, "--from", bd_from, "first t");
  add_angle(bd, "--to", bd_to, "last t");
  bd->add_option("--count", bd_count, "number of points")->capture_default_str()->check(CLI::Range(2, 1000000));
  bd->add_option("--csv", bd_csv, "output file (default stdout)");

  // model
  auto* md = app.add_subcommand("model", "Pochhammer model, limiting radius, 4F3 scan");
  std::string md_kind = "en-star", md_csv;
  std::vector<int> md_n{1};
  std::vector<std::string> md_t{"2pi"};
  int md_nmax = 64;
  md->add_option("kind", md_kind, "en-star, en-2pi, r-inf or conjecture2")
      ->check(CLI::IsMember({"en-star", "en-2pi", "r-inf", "conjecture2"}))
      ->capture_default_str();
  md->add_option("--n", md_n, "iterate indices (en-star)");
  md->add_option("--t", md_t, "angles / 4F3 parameters");
  md->add_option("--n-max", md_nmax, "largest n (en-2pi)")->capture_default_str()->check(CLI::Range(1, 1000000));
  md->add_option("--csv", md_csv, "output file (default stdout)");

  // combine
  auto* cb = app.add_subcommand("combine", "sigma-combination (sigma B - A)/(sigma - 1) of two tracks");
  std::string cb_a, cb_b, cb_out, cb_scan;
  double cb_sigma = 6.83;
  AngleOpt cb_to{"40pi"}, cb_step{"pi/16"};
  cb->add_option("a", cb_a, "track A (earlier iterate)")->required();
  cb->add_option("b", cb_b, "track B (later iterate)")->required();
  cb->add_option("--sigma", cb_sigma, "weight")->capture_default_str();
  cb->add_option("--scan", cb_scan, "search sigma in lo:hi instead");
  cb->add_option("--out", cb_out, "write the combined track");
  add_angle(cb, "--to", cb_to, "end of the error check grid");
  add_angle(cb, "--step", cb_step, "error check grid step");

  // export
  auto* ex = app.add_subcommand("export", "figure data: radius CSV or SVG overlay");
  std::string ex_kind = "svg", ex_out;
  std::vector<std::string> ex_tracks;
  AngleOpt ex_max{"20pi"};
  ex->add_option("kind", ex_kind, "svg or radius")->check(CLI::IsMember({"svg", "radius"}))->required();
  ex->add_option("tracks", ex_tracks, "track files or seed families (F, G, K, H)")->required();
  add_angle(ex, "--theta-max", ex_max, "last angle drawn (svg)");
  ex->add_option("--out", ex_out, "output file")->required();

  // verify
  auto* vf = app.add_subcommand("verify", "run the acceptance suite");
  bool vf_quick = false;
  vf->add_flag("--quick", vf_quick, "skip the chained-iteration criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCategory::usage);
  }

  try {
    if (*seed) {
      const double hi = seed_max.value();
      const PolarTrack tr = sample_seed(seed_curve(seed_family, hi), hi, seed_spacing.value());
      write_track(tr, seed_out);
      if (!seed_csv.empty()) write_csv(radius_table(tr), seed_csv);
      std::cout << seed_out << " " << tr.size() << " knots, hash " << content_hash(tr) << "\n";
    } else if (*it) {
      IterationConfig cfg;
      cfg.ode = it_ode.config();
      cfg.knot_spacing = it_spacing.value();
      cfg.domain_reserve = it_reserve.value();
      cfg.profile_spacing = it_pstep.value();
      cfg.profile_max = it_pmax.value();
      const double dom = it_domain.value();
      fs::create_directories(it_dir);
      std::optional<PolarTrack> start;
      std::string tag = it_seed;
      if (!it_from.empty()) {
        start = read_track(it_from);
        tag = to_string(start->manifest().seed_family);
      } else if (dom - (it_n - 1) * cfg.domain_reserve < two_pi + cfg.profile_margin + pi) {
        throw DomainError("--n " + std::to_string(it_n) + " needs --domain-max of at least " +
                          format_angle(two_pi + cfg.profile_margin + pi + (it_n - 1) * cfg.domain_reserve));
      }
      const auto tic = std::chrono::steady_clock::now();
      auto progress = [&](const IterationRun& r) {
        const int n = r.size();
        const auto e = r.profile(n).at(two_pi);
        std::cerr << "n = " << n << "  E(2pi) = " << (e ? std::to_string(*e) : std::string("-"))
                  << "  domain end " << format_angle(r.track(n).domain().hi) << "\n";
        if (it_all || n == it_n) {
          const std::string stem = (fs::path(it_dir) / (tag + std::to_string(n))).string();
          write_track(r.track(n), stem + ".trk");
          write_csv(profile_table(r.profile(n)), stem + "_profile.csv");
        }
      };
      const IterationRun run = start ? iterate(*start, it_n, cfg, progress)
                                     : iterate(seed_curve(it_seed, dom), it_n, dom, cfg, progress);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
      write_csv(error_at_2pi_table(run), (fs::path(it_dir) / "error_at_2pi.csv").string());
      nlohmann::json echo = {{"seed", it_seed},      {"from_track", it_from},        {"n", it_n},
                             {"domain_max", it_domain.text}, {"knot_spacing", it_spacing.text},
                             {"reserve", it_reserve.text},   {"profile_step", it_pstep.text},
                             {"profile_max", it_pmax.text},  {"ode", it_ode.echo()}};
      const std::string report = it_report.empty() ? (fs::path(it_dir) / "report.json").string() : it_report;
      detail::write_file_atomic(report, run_report(run, echo, secs).dump(2) + "\n");
    } else if (*er) {
      if (er_track.empty() == er_seed.empty()) throw DomainError("error: give exactly one of a track file or --seed");
      const std::vector<double> grid = grid_from(er_at, er_from, er_to, er_step);
      ErrorProfile p;
      if (!er_track.empty()) {
        const PolarTrack tr = read_track(er_track);
        p = error_profile(tr, grid, content_hash(tr));
      } else {
        p = error_profile(seed_curve(er_seed, grid.back() + 8.0 * pi), grid, "seed " + er_seed);
      }
      if (!er_at.empty() && er_csv.empty()) {
        for (const auto& s : p.samples) {
          std::printf("%s %.10g %.17g\n", format_angle(s.t).c_str(), s.error, s.s_star);
        }
      } else {
        print_csv(profile_table(p, er_log), er_csv);
        if (!er_csv.empty()) std::cout << "max error " << p.max_error() << "\n";
      }
    } else if (*bd) {
      const double lo = bd_from.value();
      const double hi = bd_to.value();
      CsvTable t;
      if (bd_table == "theorem1") t.columns = {"t", "lower", "E1", "upper", "gap_t4", "lambda"};
      if (bd_table == "fig10") t.columns = {"t", "residual", "model", "ratio", "exact_residual"};
      if (bd_table == "theorem2") t.columns = {"t", "delta_t5", "limit", "EG1_t52"};
      if (bd_table == "side") t.columns = {"t", "side"};
      if (bd_table == "crude") t.columns = {"t", "E1", "crude_bound"};
      const PolarSeedCurve g = make_seed(SeedFamily::G);
      for (int i = 0; i < bd_count; ++i) {
        const double tt = lo + (hi - lo) * i / (bd_count - 1);
        if (bd_table == "theorem1") {
          const Theorem1Bounds b = theorem1_bounds(tt);
          t.rows.push_back({tt, b.lower, error_F1(tt).error, b.upper, (b.upper - b.lower) * std::pow(tt, 4.0), b.lambda});
        } else if (bd_table == "fig10") {
          const Fig10Residual f = fig10_residual(tt);
          t.rows.push_back({tt, f.residual, f.model, f.ratio, f.exact_residual});
        } else if (bd_table == "theorem2") {
          t.rows.push_back({tt, theorem2_check(tt), theorem2_limit,
                            unibike_error(g, tt, spiral_guess(tt)).error * std::pow(tt, 2.5)});
        } else if (bd_table == "side") {
          t.rows.push_back({tt, tangent_side_check(tt)});
        } else {
          t.rows.push_back({tt, error_F1(tt).error, crude_bound(tt)});
        }
      }
      print_csv(t, bd_csv);
    } else if (*md) {
      CsvTable t;
      if (md_kind == "en-star") {
        t.columns = {"n", "t", "value"};
        for (int n : md_n) {
          for (const auto& s : md_t) t.rows.push_back({double(n), parse_angle(s), en_star(n, parse_angle(s))});
        }
      } else if (md_kind == "en-2pi") {
        t.columns = {"n", "product", "gamma", "double_factorial", "asymptote"};
        for (int n = 1; n <= md_nmax; ++n) {
          const auto f = en_star_at_2pi_forms(n);
          t.rows.push_back({double(n), f[0].value, f[1].value, f[2].value, f[3].value});
        }
      } else if (md_kind == "r-inf") {
        t.columns = {"t", "r_inf", "sqrt_t_over_2pi"};
        for (const auto& s : md_t) {
          const double tt = parse_angle(s);
          t.rows.push_back({tt, r_inf_approx(tt), std::sqrt(tt / two_pi)});
        }
      } else {
        std::vector<double> ts;
        for (const auto& s : md_t) ts.push_back(parse_angle(s));
        t = conjecture2_table(conjecture2_scan(ts));
      }
      print_csv(t, md_csv);
    } else if (*cb) {
      const PolarTrack a = read_track(cb_a);
      const PolarTrack b = read_track(cb_b);
      const std::vector<double> grid = uniform_grid(two_pi, cb_to.value(), cb_step.value());
      double sigma = cb_sigma;
      if (!cb_scan.empty()) {
        const auto colon = cb_scan.find(':');
        if (colon == std::string::npos) throw DomainError("--scan expects lo:hi");
        const SigmaScan s = scan_sigma(a, b, std::stod(cb_scan.substr(0, colon)), std::stod(cb_scan.substr(colon + 1)), grid);
        sigma = s.sigma;
        std::cout << "sigma " << s.sigma << "\n";
      }
      const PolarTrack c = combine(a, b, sigma);
      const double m = error_profile(c, grid).max_error();
      std::printf("max error %.6g on [2pi, %s]\n", m, cb_to.text.c_str());
      if (!cb_out.empty()) write_track(c, cb_out);
    } else if (*ex) {
      auto load = [&](const std::string& s, double hi) -> std::unique_ptr<Curve> {
        if (s == "F" || s == "G" || s == "K" || s == "H") {
          return std::make_unique<PolarSeedCurve>(seed_curve(s, hi));
        }
        return std::make_unique<PolarTrack>(read_track(s));
      };
      const double hi = ex_max.value();
      if (ex_kind == "radius") {
        if (ex_tracks.size() != 1) throw DomainError("export radius takes one track file");
        write_csv(radius_table(read_track(ex_tracks[0])), ex_out);
      } else {
        std::vector<SvgCurve> curves;
        for (const auto& s : ex_tracks) {
          const auto c = load(s, hi);
          const double end = std::min(hi, c->domain().hi);
          const auto count = static_cast<std::size_t>(std::ceil((end - c->domain().lo) / (pi / 64.0)));
          curves.push_back(sample_for_svg(*c, c->domain().lo, end, std::max<std::size_t>(count, 1),
                                          fs::path(s).filename().string()));
        }
        export_svg(curves, ex_out);
      }
    } else if (*vf) {
      VerifyOptions opt;
      opt.quick = vf_quick;
      std::error_code ec;
      const fs::path self = fs::read_symlink("/proc/self/exe", ec);
      opt.cli_path = ec ? fs::absolute(argv[0]).string() : self.string();
      int failed = 0;
      opt.on_result = [&](const CriterionResult& r) {
        if (!r.pass) ++failed;
        std::printf("[%s] %2d %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str(), r.seconds);
        std::fflush(stdout);
      };
      run_acceptance(opt);
      std::printf("%d criteria failed\n", failed);
      return failed == 0 ? 0 : static_cast<int>(ErrorCategory::numeric);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << (e.category() == ErrorCategory::usage ? "usage" : e.category() == ErrorCategory::io ? "io" : "numeric")
              << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::io);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (usage): " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::usage);
  } catch (const std::exception& e) {
    std::cerr << "error (numeric): " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::numeric);
  }
  return 0;
}
