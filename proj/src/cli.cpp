#include "infogeo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "infogeo/diffops.hpp"
#include "infogeo/expr.hpp"
#include "infogeo/family_config.hpp"
#include "infogeo/fisher.hpp"
#include "infogeo/kahler.hpp"
#include "infogeo/report_json.hpp"
#include "infogeo/verify.hpp"

namespace infogeo {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// "a,b;c,d" -> list of points of dimension dim.
std::vector<Vector> parse_points(const std::string& text, int dim) {
  std::vector<Vector> out;
  std::stringstream ss(text);
  std::string chunk;
  while (std::getline(ss, chunk, ';')) {
    if (chunk.empty()) continue;
    std::vector<double> coords;
    std::stringstream cs(chunk);
    std::string tok;
    while (std::getline(cs, tok, ',')) coords.push_back(std::stod(tok));
    if (static_cast<int>(coords.size()) != dim)
      throw Error("point '" + chunk + "' has dimension " + std::to_string(coords.size()) +
                  ", expected " + std::to_string(dim));
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = coords[i];
    out.push_back(std::move(v));
  }
  if (out.empty()) throw Error("no points given");
  return out;
}

// "min:max:count,min:max:count" -> row-major grid (first axis slowest).
std::vector<Vector> parse_grid(const std::string& text, int dim) {
  struct Axis {
    double lo, hi;
    int n;
  };
  std::vector<Axis> axes;
  std::stringstream ss(text);
  std::string chunk;
  while (std::getline(ss, chunk, ',')) {
    Axis a;
    if (std::sscanf(chunk.c_str(), "%lf:%lf:%d", &a.lo, &a.hi, &a.n) != 3 || a.n < 1)
      throw Error("bad grid axis '" + chunk + "' (want min:max:count)");
    axes.push_back(a);
  }
  if (static_cast<int>(axes.size()) != dim)
    throw Error("grid has " + std::to_string(axes.size()) + " axes, expected " +
                std::to_string(dim));
  std::vector<Vector> out;
  std::vector<int> idx(dim, 0);
  while (true) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) {
      const Axis& a = axes[i];
      v[i] = a.n == 1 ? a.lo : a.lo + (a.hi - a.lo) * idx[i] / (a.n - 1);
    }
    out.push_back(std::move(v));
    int i = dim - 1;  // last axis fastest
    for (; i >= 0; --i) {
      if (++idx[i] < axes[i].n) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

std::map<std::string, double> parse_tols(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("bad --tol '" + item + "' (want name=value)");
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

// Output sink: file or the provided stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

struct ReportArgs {
  std::string phi;
  int dim = 0;
  std::string family;
  std::string points, grid, fiber;
  std::string out_path;
  std::string format = "json";
  std::vector<std::string> tols;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::map<std::string, double> tols = parse_tols(a.tols);
  double route_tol = tols.count("route") ? tols.at("route") : 1e-9;
  Sink sink(a.out_path, out);

  if (!a.phi.empty()) {
    if (a.dim < 1) throw Error("--phi requires --dim");
    std::vector<std::string> vars;
    for (int i = 1; i <= a.dim; ++i) vars.push_back("y" + std::to_string(i));
    ScalarField field = ExprAst::parse(a.phi, vars).field();
    std::vector<Vector> pts = !a.grid.empty() ? parse_grid(a.grid, a.dim)
                                              : parse_points(a.points, a.dim);
    Vector fiber = Vector::Zero(a.dim);
    if (!a.fiber.empty()) fiber = parse_points(a.fiber, a.dim).front();

    if (a.format == "csv") sink.stream() << report_csv_header(a.dim) << "\n";
    for (const Vector& y : pts) {
      HessianReport rep = full_report(field, y, route_tol);
      KahlerCheck kc = kahler_checks(field, y, fiber, 1e300);
      if (a.format == "csv")
        sink.stream() << report_csv_row(rep, &kc) << "\n";
      else
        sink.stream() << report_to_json_line(rep, &kc) << "\n";
    }
    return 0;
  }

  if (a.family.empty()) throw Error("report needs --phi/--dim or --family");
  FamilySpec fam = load_family(a.family);
  std::vector<Vector> pts = !a.grid.empty() ? parse_grid(a.grid, fam.param_dim)
                                            : parse_points(a.points, fam.param_dim);
  if (a.format == "csv") {
    sink.stream() << "point";
    for (const std::string& n : fam.param_names) sink.stream() << "," << n;
    sink.stream() << ",rank,psd_margin,est_error,leafwise_residual\n";
  }
  int index = 0;
  for (const Vector& lam : pts) {
    FisherResult r = fisher_outer(fam, lam);
    auto [rank, kernel] = psd_and_kernel(r, 1e-9);
    double leafwise = kernel.empty() ? 0.0 : leafwise_constancy_residual(fam, lam);
    if (a.format == "csv") {
      sink.stream() << index;
      for (int i = 0; i < lam.size(); ++i) sink.stream() << "," << fmt(lam[i]);
      sink.stream() << "," << rank << "," << fmt(r.psd_margin) << "," << fmt(r.est_error) << ","
                    << fmt(leafwise) << "\n";
    } else {
      std::ostringstream line;
      line << "{\"lambda\":[";
      for (int i = 0; i < lam.size(); ++i) line << (i ? "," : "") << fmt(lam[i]);
      line << "],\"g\":[";
      for (int i = 0; i < r.g.rows(); ++i) {
        line << (i ? "," : "") << "[";
        for (int j = 0; j < r.g.cols(); ++j) line << (j ? "," : "") << fmt(r.g(i, j));
        line << "]";
      }
      line << "],\"rank\":" << rank << ",\"psd_margin\":" << fmt(r.psd_margin)
           << ",\"est_error\":" << fmt(r.est_error) << ",\"method\":\"" << r.method
           << "\",\"kernel\":[";
      for (std::size_t k = 0; k < kernel.size(); ++k) {
        line << (k ? "," : "") << "[";
        for (int i = 0; i < kernel[k].size(); ++i) line << (i ? "," : "") << fmt(kernel[k][i]);
        line << "]";
      }
      line << "],\"leafwise_residual\":" << fmt(leafwise) << "}";
      sink.stream() << line.str() << "\n";
    }
    ++index;
  }
  (void)err;
  return 0;
}

struct VerifyArgs {
  std::uint64_t seed = 20240817;
  std::string only;
  std::vector<std::string> tols;
  std::string out_path;
  std::string format = "table";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  VerifyOptions opt;
  opt.seed = a.seed;
  opt.only = a.only;
  opt.tol_overrides = parse_tols(a.tols);
  std::vector<SuiteResult> results = run_verification(opt);
  if (results.empty()) {
    err << "nothing to verify (filter '" << a.only << "' matched no suite)\n";
    return 2;
  }
  Sink sink(a.out_path, out);
  bool all_pass = true;
  if (a.format == "json") {
    for (const SuiteResult& r : results) {
      sink.stream() << "{\"suite\":\"" << r.name << "\",\"max_residual\":" << fmt(r.max_residual)
                    << ",\"tolerance\":" << fmt(r.tolerance) << ",\"pass\":"
                    << (r.pass ? "true" : "false") << "}\n";
      all_pass = all_pass && r.pass;
    }
  } else {
    sink.stream() << "suite,max_residual,tolerance,status\n";
    for (const SuiteResult& r : results) {
      sink.stream() << r.name << "," << fmt(r.max_residual) << "," << fmt(r.tolerance) << ","
                    << (r.pass ? "pass" : "FAIL") << "\n";
      all_pass = all_pass && r.pass;
    }
  }
  return all_pass ? 0 : 1;
}

struct FoliateArgs {
  std::string family;
  std::string points;
  double step = 0.05;
  int steps = 100;
  std::string out_path;
};

int cmd_foliate(const FoliateArgs& a, std::ostream& out, std::ostream& err) {
  FamilySpec fam = load_family(a.family);
  const int m = fam.param_dim;
  std::vector<Vector> seeds = parse_points(a.points, m);

  // Every seed must sit on a nontrivial kernel.
  for (const Vector& seed : seeds) {
    auto [rank, kernel] = psd_and_kernel(fisher_outer(fam, seed), 1e-9);
    if (kernel.empty()) {
      err << "kernel is trivial at seed; nothing to foliate\n";
      return 2;
    }
    (void)rank;
  }

  Sink sink(a.out_path, out);
  sink.stream() << "curve,step,arc_length";
  for (const std::string& n : fam.param_names) sink.stream() << "," << n;
  sink.stream() << ",rank,leafwise_residual,status\n";

  for (std::size_t c = 0; c < seeds.size(); ++c) {
    Vector lam = seeds[c];
    auto [rank0, kernel0] = psd_and_kernel(fisher_outer(fam, lam), 1e-9);
    Vector dir = kernel0.front();

    // Unit kernel direction aligned with the previous one.
    auto direction = [&fam, rank0](const Vector& p, const Vector& prev) {
      auto [rank, kernel] = psd_and_kernel(fisher_outer(fam, p), 1e-9);
      if (rank != rank0) throw RankDriftError("rank changed along the leaf");
      const Vector* best = &kernel.front();
      double best_abs = -1.0;
      for (const Vector& k : kernel) {
        double ov = std::abs(prev.dot(k));
        if (ov > best_abs) {
          best_abs = ov;
          best = &k;
        }
      }
      return Vector(prev.dot(*best) < 0.0 ? -*best : *best);
    };

    auto emit = [&](int step_index, double s, const Vector& p, const char* status) {
      int rank = -1;
      double leafwise = 0.0;
      if (std::string(status) == "ok") {
        rank = psd_and_kernel(fisher_outer(fam, p), 1e-9).first;
        leafwise = leafwise_constancy_residual(fam, p);
      }
      sink.stream() << c << "," << step_index << "," << fmt(s);
      for (int i = 0; i < p.size(); ++i) sink.stream() << "," << fmt(p[i]);
      sink.stream() << "," << rank << "," << fmt(leafwise) << "," << status << "\n";
    };

    emit(0, 0.0, lam, "ok");
    double arc = 0.0;
    for (int n = 1; n <= a.steps; ++n) {
      try {
        double h = a.step;
        Vector k1 = direction(lam, dir);
        Vector k2 = direction(lam + 0.5 * h * k1, k1);
        Vector k3 = direction(lam + 0.5 * h * k2, k2);
        Vector k4 = direction(lam + h * k3, k3);
        lam += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        dir = k1;
        arc += h;
        emit(n, arc, lam, "ok");
      } catch (const RankDriftError&) {
        emit(n, arc, lam, "rank_drift");
        break;
      }
    }
  }
  return 0;
}

struct NatgradArgs {
  std::string family;
  std::string objective;
  std::string start;
  double eta = 0.1;
  int iters = 50;
  std::string out_path;
};

int cmd_natgrad(const NatgradArgs& a, std::ostream& out, std::ostream& err) {
  FamilySpec fam = load_family(a.family);
  const int m = fam.param_dim;
  ScalarField objective = ExprAst::parse(a.objective, fam.param_names).field();
  Vector lam = parse_points(a.start, m).front();

  Sink sink(a.out_path, out);
  sink.stream() << "iter";
  for (const std::string& n : fam.param_names) sink.stream() << "," << n;
  sink.stream() << ",objective,grad_norm,kernel_component\n";

  for (int it = 0; it <= a.iters; ++it) {
    Jet4 jet = jet_of(objective, lam);
    Vector grad = gradient_of(jet);

    FisherResult fr = fisher_outer(fam, lam);
    auto [rank, kernel] = psd_and_kernel(fr, 1e-9);  // NotPSDError -> exit 2
    (void)rank;

    // Pseudo-inverse over the normal space: kernel directions get no update.
    EigenDecomp ed = eig_sym(fr.g);
    double thr = std::max(1e-9 * ed.eigenvalues.cwiseAbs().maxCoeff(), 1e-12);
    Vector update = Vector::Zero(m);
    for (int i = 0; i < m; ++i) {
      if (ed.eigenvalues[i] <= thr) continue;
      Vector v = ed.eigenvectors.col(i);
      update += (v.dot(grad) / ed.eigenvalues[i]) * v;
    }
    double kernel_component = 0.0;
    for (const Vector& k : kernel) kernel_component = std::max(kernel_component, std::abs(k.dot(update)));

    sink.stream() << it;
    for (int i = 0; i < m; ++i) sink.stream() << "," << fmt(lam[i]);
    sink.stream() << "," << fmt(jet.value()) << "," << fmt(grad.norm()) << ","
                  << fmt(kernel_component) << "\n";

    lam -= a.eta * update;
  }
  (void)err;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hessian-structure and Fisher-geometry toolkit"};
  app.require_subcommand(1);

  ReportArgs ra;
  CLI::App* report = app.add_subcommand("report", "per-point tensor reports");
  report->add_option("--phi", ra.phi, "potential expression over y1..yq");
  report->add_option("--dim", ra.dim, "number of transverse coordinates");
  report->add_option("--family", ra.family, "family config path (Fisher report)");
  report->add_option("--points", ra.points, "semicolon-separated points, comma coords");
  report->add_option("--grid", ra.grid, "per-axis min:max:count, comma-separated");
  report->add_option("--fiber", ra.fiber, "fiber coordinates for the lifted checks");
  report->add_option("--out", ra.out_path, "output path (default stdout)");
  report->add_option("--format", ra.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--tol", ra.tols, "tolerance overrides name=value");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "run the identity suites");
  verify->add_option("--seed", va.seed, "random corpus seed");
  verify->add_option("--only", va.only, "substring filter on suite names");
  verify->add_option("--tol", va.tols, "tolerance overrides name=value");
  verify->add_option("--out", va.out_path, "output path (default stdout)");
  verify->add_option("--format", va.format, "table|json")
      ->check(CLI::IsMember({"table", "json"}));

  FoliateArgs fa;
  CLI::App* foliate = app.add_subcommand("foliate", "integrate kernel leaves");
  foliate->add_option("--family", fa.family, "family config path")->required();
  foliate->add_option("--points", fa.points, "seed points")->required();
  foliate->add_option("--step", fa.step, "RK4 step size");
  foliate->add_option("--steps", fa.steps, "number of steps");
  foliate->add_option("--out", fa.out_path, "output path (default stdout)");

  NatgradArgs na;
  CLI::App* natgrad = app.add_subcommand("natgrad", "natural-gradient descent demo");
  natgrad->add_option("--family", na.family, "family config path")->required();
  natgrad->add_option("--objective", na.objective, "objective over the parameter names")
      ->required();
  natgrad->add_option("--x0", na.start, "start point")->required();
  natgrad->add_option("--eta", na.eta, "step size");
  natgrad->add_option("--iters", na.iters, "iteration count");
  natgrad->add_option("--out", na.out_path, "output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (report->parsed()) return cmd_report(ra, out, err);
    if (verify->parsed()) return cmd_verify(va, out, err);
    if (foliate->parsed()) return cmd_foliate(fa, out, err);
    if (natgrad->parsed()) return cmd_natgrad(na, out, err);
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownIdentifierError& e) {
    err << "unknown identifier: " << e.what() << "\n";
    return 2;
  } catch (const NotPSDError& e) {
    err << "not positive semi-definite: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace infogeo
