#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

#include "cli.hpp"
#include "qtomo/analytic.hpp"
#include "qtomo/io.hpp"
#include "qtomo/povm.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo::cli {

namespace {

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace

void run_fig1(const FigureOptions& opts, std::ostream& out) {
  ExperimentConfig cfg = fig1_config(opts.seed, opts.reps);
  cfg.threads = opts.threads;
  cfg.output = (opts.out_dir / "fig1").string();
  const ExperimentResult res = run_experiment(cfg);

  const BlochVector s = cfg.state.bloch;
  const double cle_theory = *qubit_closed_form(QubitMeasurement::cube, s, QubitRecon::canonical, QubitFigure::mse);
  const double blue_theory = *qubit_closed_form(QubitMeasurement::cube, s, QubitRecon::optimal, QubitFigure::mse);
  out << "cube measurement, Bloch vector (" << s.x << ", " << s.y << ", " << s.z << "), R = " << cfg.reps
      << "\n";
  out << "theory: CLE " << short_number(cle_theory) << ", BLUE " << short_number(blue_theory) << "\n";
  std::map<std::pair<std::uint64_t, std::string>, double> mean;
  for (const auto& a : res.aggregate)
    if (a.figure == "mse") mean[{a.n, a.estimator}] = a.mean;
  out << "N\tcle\tblue_oracle\tblue_plugin\tmle\toracle~plugin\tblue_oracle~mle\n";
  for (const auto n : cfg.n_grid) {
    out << n;
    for (const char* e : {"cle", "blue_oracle", "blue_plugin", "mle", "blue_oracle~blue_plugin",
                          "blue_oracle~mle"})
      out << '\t' << short_number(mean[{n, e}]);
    out << "\n";
  }
  out << "wrote " << cfg.output << ".csv and " << cfg.output << "_aggregate.csv\n";
}

void run_fig2(const FigureOptions& opts, std::ostream& out) {
  const auto path = opts.out_dir / "fig2.csv";
  auto csv = open_csv(path);
  csv << "d,s,reconstruction,figure,value\n";
  for (int d = 2; d <= 6; ++d) {
    for (int k = 0; k < 100; ++k) {
      const double s = 0.01 * k;
      const FigureSet blue = covariant_blue_figures(d, 1, s, WeightSpec::bures());
      const FigureSet canon = covariant_canonical_figures(FamilyState(d, 1, s).eigenvalues());
      csv << d << ',' << full(s) << ",optimal,mse," << full(blue.mse) << '\n';
      csv << d << ',' << full(s) << ",optimal,msb," << full(*blue.msb) << '\n';
      csv << d << ',' << full(s) << ",canonical,mse," << full(canon.mse) << '\n';
      csv << d << ',' << full(s) << ",canonical,msb," << full(*canon.msb) << '\n';
    }
  }
  out << "covariant measurement, r = 1, d = 2..6\n";
  out << "pure-state limit of the optimal scaled MSE 2(d-1): ";
  for (int d = 2; d <= 6; ++d) out << short_number(pure_state_limits(d).covariant_mse) << (d < 6 ? ", " : "\n");
  out << "wrote " << path.string() << "\n";
}

void run_fig3(const FigureOptions& opts, std::ostream& out) {
  constexpr std::uint64_t shots = 300;
  std::vector<BlochVector> states{{0.0, 0.0, 0.0}};
  for (double radius : {0.45, 0.9})
    for (int k = 0; k < 8; ++k) {
      const double phi = k * std::numbers::pi / 4.0;
      states.push_back({radius * std::cos(phi), 0.0, radius * std::sin(phi)});
    }
  auto samples = open_csv(opts.out_dir / "fig3_samples.csv");
  auto ellipses = open_csv(opts.out_dir / "fig3_ellipses.csv");
  samples << "state,x,z,rep,estimator,bx,bz\n";
  ellipses << "state,x,z,estimator,source,cxx,cxz,czz\n";

  for (std::size_t i = 0; i < states.size(); ++i) {
    const BlochVector& s = states[i];
    ExperimentConfig cfg;
    cfg.povm = "builtin:octahedron";
    cfg.state = StateSpec::from_bloch(s);
    cfg.estimators = {EstimatorKind::cle, EstimatorKind::blue_oracle};
    cfg.n_grid = {shots};
    cfg.reps = opts.reps;
    cfg.seed = derive_seed(opts.seed, i);
    cfg.figures = {"bloch"};
    cfg.pairwise = false;
    cfg.threads = opts.threads;
    const ExperimentResult res = run_experiment(cfg);

    std::map<std::pair<int, std::string>, std::pair<double, double>> xz;
    for (const auto& t : res.trials) {
      if (t.figure == "bloch_x") xz[{t.rep, t.estimator}].first = t.value;
      if (t.figure == "bloch_z") xz[{t.rep, t.estimator}].second = t.value;
    }
    for (const auto& [key, v] : xz)
      samples << i << ',' << full(s.x) << ',' << full(s.z) << ',' << key.first << ',' << key.second << ','
              << full(v.first) << ',' << full(v.second) << '\n';

    for (const std::string est : {"cle", "blue_oracle"}) {
      // Predicted covariance of the Bloch estimate: C_Bloch / N.
      const double n = static_cast<double>(shots);
      double cxx, cxz, czz;
      if (est == "cle") {
        cxx = (3.0 - s.x * s.x) / n;
        cxz = -s.x * s.z / n;
        czz = (3.0 - s.z * s.z) / n;
      } else {
        cxx = 3.0 * (1.0 - s.x * s.x) / n;
        cxz = 0.0;
        czz = 3.0 * (1.0 - s.z * s.z) / n;
      }
      ellipses << i << ',' << full(s.x) << ',' << full(s.z) << ',' << est << ",theory," << full(cxx) << ','
               << full(cxz) << ',' << full(czz) << '\n';
      double mx = 0, mz = 0;
      int count = 0;
      for (const auto& [key, v] : xz)
        if (key.second == est) {
          mx += v.first;
          mz += v.second;
          ++count;
        }
      if (count < 2) continue;
      mx /= count;
      mz /= count;
      double exx = 0, exz = 0, ezz = 0;
      for (const auto& [key, v] : xz)
        if (key.second == est) {
          exx += (v.first - mx) * (v.first - mx);
          exz += (v.first - mx) * (v.second - mz);
          ezz += (v.second - mz) * (v.second - mz);
        }
      ellipses << i << ',' << full(s.x) << ',' << full(s.z) << ',' << est << ",empirical,"
               << full(exx / (count - 1)) << ',' << full(exz / (count - 1)) << ',' << full(ezz / (count - 1))
               << '\n';
    }
  }
  out << "octahedron (MUB) measurement, " << states.size() << " states in the x-z plane, N = " << shots
      << ", R = " << opts.reps << "\n";
  out << "wrote " << (opts.out_dir / "fig3_samples.csv").string() << " and "
      << (opts.out_dir / "fig3_ellipses.csv").string() << "\n";
}

void run_fig4(const FigureOptions& opts, std::ostream& out) {
  struct Curve {
    QubitMeasurement m;
    QubitRecon r;
  };
  const Curve curves[] = {{QubitMeasurement::sic, QubitRecon::optimal},
                          {QubitMeasurement::mub, QubitRecon::optimal},
                          {QubitMeasurement::cube, QubitRecon::optimal},
                          {QubitMeasurement::covariant, QubitRecon::optimal},
                          {QubitMeasurement::iso, QubitRecon::canonical}};
  const QubitFigure figs[] = {QubitFigure::avg_mse, QubitFigure::avg_msb, QubitFigure::avg_logvolume};

  auto csv = open_csv(opts.out_dir / "fig4_curves.csv");
  csv << "s,measurement,reconstruction,figure,value\n";
  for (int k = 0; k < 100; ++k) {
    const double s = 0.01 * k;
    for (const auto& c : curves)
      for (const auto f : figs)
        csv << full(s) << ',' << to_string(c.m) << ',' << to_string(c.r) << ',' << to_string(f) << ','
            << full(*qubit_closed_form(c.m, {0.0, 0.0, s}, c.r, f)) << '\n';
  }

  const int samples = opts.reps * 100;
  auto haar = open_csv(opts.out_dir / "fig4_haar.csv");
  haar << "s,measurement,figure,mean,stderr,samples,closed_form\n";
  const std::pair<QubitMeasurement, const char*> povms[] = {
      {QubitMeasurement::sic, "tetrahedron"}, {QubitMeasurement::mub, "octahedron"},
      {QubitMeasurement::cube, "cube"}};
  out << "Haar averages with " << samples << " samples (optimal reconstruction)\n";
  out << "s\tmeasurement\tavg_mse\tavg_msb\tavg_logvolume\n";
  const double grid[] = {0.3, 0.6, 0.9};
  for (std::size_t si = 0; si < 3; ++si) {
    for (std::size_t mi = 0; mi < 3; ++mi) {
      const Povm povm = platonic_povm(povms[mi].second);
      const auto stats = haar_average(
          [&](const CMatrix& rho) {
            const PointFigures f = point_figures(povm, rho, true);
            RVector v(3);
            v << f.mse, f.msb, f.log_volume;
            return v;
          },
          qubit_spectrum(grid[si]), samples, derive_seed(opts.seed, si, mi), opts.threads);
      out << grid[si] << '\t' << to_string(povms[mi].first);
      for (int f = 0; f < 3; ++f) {
        const double closed = *qubit_closed_form(povms[mi].first, {0.0, 0.0, grid[si]}, QubitRecon::optimal, figs[f]);
        haar << full(grid[si]) << ',' << to_string(povms[mi].first) << ',' << to_string(figs[f]) << ','
             << full(stats.mean(f)) << ',' << full(stats.stderr_(f)) << ',' << samples << ',' << full(closed)
             << '\n';
        out << '\t' << short_number(stats.mean(f));
      }
      out << "\n";
    }
  }
  out << "wrote " << (opts.out_dir / "fig4_curves.csv").string() << " and "
      << (opts.out_dir / "fig4_haar.csv").string() << "\n";
}

}  // namespace qtomo::cli
