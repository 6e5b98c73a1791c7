#include "lbpcert/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "lbpcert/certificates.hpp"
#include "lbpcert/rng.hpp"
#include "lbpcert/spectral.hpp"
#include "lbpcert/text_format.hpp"

namespace lbpcert {

FactorGraph generate_grid(const GridSpec& spec) {
  if (spec.rows < 2 || spec.cols < 2)
    throw std::invalid_argument("grid needs rows >= 2 and cols >= 2");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma) ||
      !std::isfinite(spec.j0) || !std::isfinite(spec.theta))
    throw std::invalid_argument("grid parameters must be finite, sigma >= 0");

  const int n = spec.rows * spec.cols;
  std::mt19937_64 gen(spec.seed);
  std::vector<Factor> factors;

  auto add_pair = [&](int i, int j) {
    const double coupling = spec.j0 + spec.sigma * normal(gen);
    const double hi = std::exp(coupling), lo = std::exp(-coupling);
    factors.push_back({{i, j}, {hi, lo, lo, hi}});
  };

  // row-major vertex order; per vertex the right edge, then the down edge
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const int v = r * spec.cols + c;
      if (spec.periodic || c + 1 < spec.cols)
        add_pair(v, r * spec.cols + (c + 1) % spec.cols);
      if (spec.periodic || r + 1 < spec.rows)
        add_pair(v, ((r + 1) % spec.rows) * spec.cols + c);
    }
  }
  if (spec.theta != 0.0) {
    const double hi = std::exp(spec.theta), lo = std::exp(-spec.theta);
    for (int v = 0; v < n; ++v) factors.push_back({{v}, {lo, hi}});
  }
  return make_graph(n, std::vector<int>(static_cast<std::size_t>(n), 2),
                    std::move(factors));
}

ConvergenceStats empirical_convergence(const FactorGraph& g, int trials,
                                       const LbpOptions& opts) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  ConvergenceStats stats;
  int converged = 0;
  double iteration_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    LbpOptions o = opts;
    o.init = MessageInit::kRandom;
    o.seed = opts.seed + static_cast<std::uint64_t>(t);
    const LbpResult r = run_lbp(g, o);
    if (r.converged) {
      ++converged;
      iteration_sum += r.iterations;
    }
    stats.max_final_residual =
        std::max(stats.max_final_residual, r.final_residual);
  }
  stats.fraction = static_cast<double>(converged) / trials;
  stats.mean_iterations = converged ? iteration_sum / converged : 0.0;
  return stats;
}

std::vector<SweepRow> run_sweep(std::span<const GridSpec> specs,
                                int instances_per_point, int trials,
                                const LbpOptions& opts) {
  if (specs.empty()) throw std::invalid_argument("no sweep points given");
  if (instances_per_point < 1)
    throw std::invalid_argument("instances_per_point must be >= 1");

  std::vector<SweepRow> rows;
  rows.reserve(specs.size() * static_cast<std::size_t>(instances_per_point));
  for (const GridSpec& spec : specs) {
    for (int inst = 0; inst < instances_per_point; ++inst) {
      GridSpec gs = spec;
      gs.seed = spec.seed + static_cast<std::uint64_t>(inst);
      const FactorGraph g = generate_grid(gs);

      SweepRow row;
      row.instance = inst;
      row.seed = gs.seed;
      row.j0 = spec.j0;
      row.sigma = spec.sigma;

      const CertificateReport l1 = l1_condition_general(g);
      const CertificateReport sp = spectral_condition(g);
      const CertificateReport ih = ihler_condition_pairwise(g);
      row.l1_value = l1.value;
      row.l1_pass = l1.pass;
      row.rho = sp.value;
      row.spectral_pass = sp.pass;
      row.ihler_value = ih.value;
      row.ihler_pass = ih.pass;

      LbpOptions o = opts;
      o.seed = gs.seed;
      const ConvergenceStats stats = empirical_convergence(g, trials, o);
      row.empirical_converged = stats.fraction == 1.0;
      row.iterations = stats.mean_iterations;
      row.final_residual = stats.max_final_residual;
      rows.push_back(row);
    }
  }
  return rows;
}

void emit_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out << "instance,seed,j0,sigma,l1_value,rho,ihler_value,l1_pass,"
         "spectral_pass,ihler_pass,empirical_converged,iterations,"
         "final_residual\n";
  auto b = [](bool v) { return v ? "true" : "false"; };
  for (const SweepRow& r : rows) {
    out << r.instance << ',' << r.seed << ',' << format_double(r.j0) << ','
        << format_double(r.sigma) << ',' << format_double(r.l1_value) << ','
        << format_double(r.rho) << ',' << format_double(r.ihler_value) << ','
        << b(r.l1_pass) << ',' << b(r.spectral_pass) << ',' << b(r.ihler_pass)
        << ',' << b(r.empirical_converged) << ','
        << format_double(r.iterations) << ','
        << format_double(r.final_residual) << '\n';
  }
}

namespace {

struct SeriesPoint {
  double j0 = 0.0;
  double sigma = 0.0;
};

// Boundary along `values` sampled at `coords`: the interpolated coordinate
// where the value first crosses `threshold` (rising = certificate value
// crossing up, falling = convergence fraction crossing down). Falls back to
// the last coordinate when the series never leaves the inner region, and to
// the first when it starts outside.
double crossing(const std::vector<double>& coords,
                const std::vector<double>& values, double threshold,
                bool rising) {
  auto outside = [&](double v) { return rising ? v >= threshold : v < threshold; };
  if (outside(values.front())) return coords.front();
  for (std::size_t k = 1; k < coords.size(); ++k) {
    if (!outside(values[k])) continue;
    const double v0 = values[k - 1], v1 = values[k];
    double t = v1 == v0 ? 0.0 : (threshold - v0) / (v1 - v0);
    t = std::clamp(t, 0.0, 1.0);
    return coords[k - 1] + t * (coords[k] - coords[k - 1]);
  }
  return coords.back();
}

}  // namespace

void emit_phase_plot(std::span<const SweepRow> rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("no rows to plot");

  std::set<double> j0_set, sigma_set;
  for (const SweepRow& r : rows) {
    j0_set.insert(r.j0);
    sigma_set.insert(r.sigma);
  }
  const std::vector<double> j0s(j0_set.begin(), j0_set.end());
  const std::vector<double> sigmas(sigma_set.begin(), sigma_set.end());

  struct Cell {
    double l1 = 0, rho = 0, ihler = 0, frac = 0;
    int count = 0;
  };
  std::map<std::pair<double, double>, Cell> cells;
  for (const SweepRow& r : rows) {
    Cell& c = cells[{r.j0, r.sigma}];
    c.l1 += r.l1_value;
    c.rho += r.rho;
    c.ihler += r.ihler_value;
    c.frac += r.empirical_converged ? 1.0 : 0.0;
    ++c.count;
  }
  if (cells.size() != j0s.size() * sigmas.size())
    throw std::invalid_argument("rows do not cover a full (j0, sigma) lattice");
  for (auto& [key, c] : cells) {
    c.l1 /= c.count;
    c.rho /= c.count;
    c.ihler /= c.count;
    c.frac /= c.count;
  }

  struct Series {
    const char* name;
    const char* color;
    bool rising;  // certificate value crosses 1 upward; fraction falls past 1/2
    double threshold;
    std::vector<SeriesPoint> boundary;
  };
  std::array<Series, 4> series{{{"l1", "#d62728", true, 1.0, {}},
                                {"spectral", "#1f77b4", true, 1.0, {}},
                                {"ihler", "#2ca02c", true, 1.0, {}},
                                {"empirical", "#7f7f7f", false, 0.5, {}}}};

  auto value_of = [&](const Series& s, const Cell& c) {
    if (s.name == std::string("l1")) return c.l1;
    if (s.name == std::string("spectral")) return c.rho;
    if (s.name == std::string("ihler")) return c.ihler;
    return c.frac;
  };

  if (sigmas.size() >= 2) {
    // per j0 column: boundary sigma where the series leaves the inner region
    for (auto& s : series) {
      for (double j0 : j0s) {
        std::vector<double> vals;
        for (double sg : sigmas) vals.push_back(value_of(s, cells[{j0, sg}]));
        s.boundary.push_back({j0, crossing(sigmas, vals, s.threshold, s.rising)});
      }
    }
  } else {
    // degenerate lattice (one sigma): locate the boundary along j0 instead
    for (auto& s : series) {
      std::vector<double> vals;
      for (double j0 : j0s) vals.push_back(value_of(s, cells[{j0, sigmas[0]}]));
      s.boundary.push_back(
          {crossing(j0s, vals, s.threshold, s.rising), sigmas[0]});
    }
  }

  // viewport mapping
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 20, mb = 55;
  double xmin = j0s.front(), xmax = j0s.back();
  double ymin = sigmas.front(), ymax = sigmas.back();
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(ymin) << "\" x2=\""
      << px(xmax) << "\" y2=\"" << py(ymin)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(ymin) << "\" x2=\""
      << px(xmin) << "\" y2=\"" << py(ymax)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\""
      << (height - 12) << "\" text-anchor=\"middle\">J0/J</text>\n"
      << "<text x=\"18\" y=\"" << (mt + (height - mt - mb) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (mt + (height - mt - mb) / 2) << ")\">J</text>\n"
      << "<text x=\"" << px(xmin) << "\" y=\"" << (height - mb + 18)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(xmin)
      << "</text>\n"
      << "<text x=\"" << px(xmax) << "\" y=\"" << (height - mb + 18)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(xmax)
      << "</text>\n"
      << "<text x=\"" << (ml - 8) << "\" y=\"" << py(ymin)
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(ymin)
      << "</text>\n"
      << "<text x=\"" << (ml - 8) << "\" y=\"" << py(ymax)
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(ymax)
      << "</text>\n";

  for (const auto& s : series) {
    if (s.boundary.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.boundary)
        out << px(p.j0) << "," << py(p.sigma) << " ";
      out << "\"/>\n";
    }
    for (const auto& p : s.boundary) {
      out << "<circle r=\"3.5\" fill=\"" << s.color << "\" cx=\"" << px(p.j0)
          << "\" cy=\"" << py(p.sigma) << "\" data-series=\"" << s.name
          << "\" data-j0=\"" << format_double(p.j0) << "\" data-sigma=\""
          << format_double(p.sigma) << "\"/>\n";
    }
  }

  double ly = mt + 14;
  for (const auto& s : series) {
    out << "<rect x=\"" << (width - mr - 150) << "\" y=\"" << (ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n"
        << "<text x=\"" << (width - mr - 135) << "\" y=\"" << ly
        << "\" font-size=\"12\">" << s.name << "</text>\n";
    ly += 16;
  }
  out << "<text x=\"" << (width - mr - 150) << "\" y=\"" << ly
      << "\" font-size=\"10\">Simon's condition: not available</text>\n";
  out << "</svg>\n";
}

}  // namespace lbpcert
