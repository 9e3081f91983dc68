#include "fdes/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdes/operators.hpp"

namespace fdes {

namespace {

constexpr double kPi = 3.14159265358979323846;

double triple_cos(double x, double y, double z) {
  return std::cos(kPi * x) * std::cos(kPi * y) * std::cos(kPi * z);
}

struct BumpValue {
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
};

// Compactly supported smooth bump exp(1/((x-1)^2 - 1/4)) on |x-1| < 1/2 with
// its first two derivatives; identically zero outside the support. The
// underflow guard keeps 0 * inf out of the derivative factors right at the
// support boundary.
BumpValue bump(double x) {
  BumpValue b;
  const double t = x - 1.0;
  const double d = t * t - 0.25;
  if (d >= 0.0) return b;
  const double f = std::exp(1.0 / d);
  if (f == 0.0) return b;
  const double g1 = -2.0 * t / (d * d);
  const double g2 = (6.0 * t * t + 0.5) / (d * d * d);
  b.f = f;
  b.fp = f * g1;
  b.fpp = f * (g1 * g1 + g2);
  return b;
}

ManufacturedCase case_test1() {
  ManufacturedCase mc;
  mc.id = 1;
  mc.phi = [](double x, double y, double z) { return -triple_cos(x, y, z); };
  mc.eps = [](double, double, double) { return 1.0; };
  mc.rho = [](double x, double y, double z) {
    return -3.0 * kPi * kPi * triple_cos(x, y, z);
  };
  mc.gx = [](double x, double y, double z) {
    return kPi * std::sin(kPi * x) * std::cos(kPi * y) * std::cos(kPi * z);
  };
  mc.gy = [](double x, double y, double z) {
    return kPi * std::cos(kPi * x) * std::sin(kPi * y) * std::cos(kPi * z);
  };
  mc.gz = [](double x, double y, double z) {
    return kPi * std::cos(kPi * x) * std::cos(kPi * y) * std::sin(kPi * z);
  };
  mc.Dx = [](double x, double y, double z) {
    return -kPi * std::sin(kPi * x) * std::cos(kPi * y) * std::cos(kPi * z);
  };
  mc.Dy = [](double x, double y, double z) {
    return -kPi * std::cos(kPi * x) * std::sin(kPi * y) * std::cos(kPi * z);
  };
  mc.Dz = [](double x, double y, double z) {
    return -kPi * std::cos(kPi * x) * std::cos(kPi * y) * std::sin(kPi * z);
  };
  return mc;
}

ManufacturedCase case_test2() {
  ManufacturedCase mc;
  mc.id = 2;
  mc.phi = [](double x, double y, double z) {
    return bump(x).f * std::cos(kPi * y) * std::cos(kPi * z);
  };
  mc.eps = [](double x, double, double) { return 3.0 - std::cos(kPi * x); };
  mc.rho = [](double x, double y, double z) {
    const BumpValue b = bump(x);
    const double eps = 3.0 - std::cos(kPi * x);
    const double cyz = std::cos(kPi * y) * std::cos(kPi * z);
    return -(kPi * std::sin(kPi * x) * b.fp + eps * b.fpp -
             2.0 * kPi * kPi * eps * b.f) *
           cyz;
  };
  mc.gx = [](double x, double y, double z) {
    return bump(x).fp * std::cos(kPi * y) * std::cos(kPi * z);
  };
  mc.gy = [](double x, double y, double z) {
    return -kPi * bump(x).f * std::sin(kPi * y) * std::cos(kPi * z);
  };
  mc.gz = [](double x, double y, double z) {
    return -kPi * bump(x).f * std::cos(kPi * y) * std::sin(kPi * z);
  };
  mc.Dx = [](double x, double y, double z) {
    return -(3.0 - std::cos(kPi * x)) * bump(x).fp * std::cos(kPi * y) *
           std::cos(kPi * z);
  };
  mc.Dy = [](double x, double y, double z) {
    return (3.0 - std::cos(kPi * x)) * kPi * bump(x).f * std::sin(kPi * y) *
           std::cos(kPi * z);
  };
  mc.Dz = [](double x, double y, double z) {
    return (3.0 - std::cos(kPi * x)) * kPi * bump(x).f * std::cos(kPi * y) *
           std::sin(kPi * z);
  };
  return mc;
}

ManufacturedCase case_test3() {
  ManufacturedCase mc;
  mc.id = 3;
  mc.phi = [](double x, double y, double z) { return -triple_cos(x, y, z); };
  mc.eps = [](double x, double y, double z) {
    return 3.0 - triple_cos(x, y, z);
  };
  // rho = -div(eps grad phi) - sum_s q_s e^{-q_s phi}; here eps = 3 + phi,
  // so div(eps grad phi) = |grad phi|^2 + (3 + phi) lap phi with
  // lap phi = -3 pi^2 phi.
  mc.rho = [](double x, double y, double z) {
    const double phi = -triple_cos(x, y, z);
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    const double sz = std::sin(kPi * z), cz = std::cos(kPi * z);
    const double grad2 =
        kPi * kPi *
        (sx * sx * cy * cy * cz * cz + cx * cx * sy * sy * cz * cz +
         cx * cx * cy * cy * sz * sz);
    return 3.0 * kPi * kPi * phi * (3.0 + phi) - grad2 - std::exp(-phi) +
           std::exp(phi);
  };
  mc.gx = [](double x, double y, double z) {
    return kPi * std::sin(kPi * x) * std::cos(kPi * y) * std::cos(kPi * z);
  };
  mc.gy = [](double x, double y, double z) {
    return kPi * std::cos(kPi * x) * std::sin(kPi * y) * std::cos(kPi * z);
  };
  mc.gz = [](double x, double y, double z) {
    return kPi * std::cos(kPi * x) * std::cos(kPi * y) * std::sin(kPi * z);
  };
  mc.Dx = [](double x, double y, double z) {
    return -(3.0 - triple_cos(x, y, z)) * kPi * std::sin(kPi * x) *
           std::cos(kPi * y) * std::cos(kPi * z);
  };
  mc.Dy = [](double x, double y, double z) {
    return -(3.0 - triple_cos(x, y, z)) * kPi * std::cos(kPi * x) *
           std::sin(kPi * y) * std::cos(kPi * z);
  };
  mc.Dz = [](double x, double y, double z) {
    return -(3.0 - triple_cos(x, y, z)) * kPi * std::cos(kPi * x) *
           std::cos(kPi * y) * std::sin(kPi * z);
  };
  mc.conc.push_back([](double x, double y, double z) {
    return std::exp(triple_cos(x, y, z));  // e^{-q1 phi}, q1 = +1
  });
  mc.conc.push_back([](double x, double y, double z) {
    return std::exp(-triple_cos(x, y, z));  // e^{-q2 phi}, q2 = -1
  });
  return mc;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> pair_orders(const std::vector<ErrorRecord>& records,
                                double ErrorRecord::* field) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const double e0 = records[i].*field;
    const double e1 = records[i + 1].*field;
    const double ratio = static_cast<double>(records[i + 1].n) /
                         static_cast<double>(records[i].n);
    orders.push_back(std::log(e0 / e1) / std::log(ratio));
  }
  return orders;
}

}  // namespace

ManufacturedProblem manufactured_problem(int id, int N) {
  ManufacturedProblem mp;
  switch (id) {
    case 1:
      mp.c = case_test1();
      break;
    case 2:
      mp.c = case_test2();
      break;
    case 3:
      mp.c = case_test3();
      break;
    default:
      throw std::invalid_argument(
          "manufactured_problem: test id must be 1, 2, or 3");
  }
  const Grid grid = build_grid(mp.c.L, N);
  const EdgePermittivity eps =
      half_edge_permittivity(sample_node_scalar(mp.c.eps, grid));
  const NodeScalar rho_samples = sample_node_scalar(mp.c.rho, grid);

  if (id == 3) {
    mp.is_pb = true;
    const NodeScalar phi = sample_node_scalar(mp.c.phi, grid);
    const double h3 = grid.h * grid.h * grid.h;
    const double* pp = phi.data();
    for (const double q : {1.0, -1.0}) {
      double sum = 0.0;
      for (std::size_t t = 0; t < phi.a.size(); ++t) {
        sum += std::exp(-q * pp[t]);
      }
      mp.c.species.push_back({q, h3 * sum});
    }
    mp.pb = PBProblem{grid, eps,
                      project_source(rho_samples, SourceMode::pb,
                                     mp.c.species),
                      mp.c.species};
  } else {
    mp.poisson =
        PoissonProblem{grid, eps,
                       project_source(rho_samples, SourceMode::poisson)};
  }
  return mp;
}

ErrorRecord compute_errors(const Displacement& D,
                           const std::vector<NodeScalar>* conc,
                           const ManufacturedCase& mc) {
  const Grid& g = D.grid;
  ErrorRecord rec;
  rec.n = g.N;
  rec.h = g.h;

  const Displacement exact = sample_displacement(mc.Dx, mc.Dy, mc.Dz, g);
  Displacement diff(g);
  {
    const double* nu = D.u.data();
    const double* nv = D.v.data();
    const double* nw = D.w.data();
    const double* eu = exact.u.data();
    const double* ev = exact.v.data();
    const double* ew = exact.w.data();
    double* du = diff.u.data();
    double* dv = diff.v.data();
    double* dw = diff.w.data();
    for (std::size_t t = 0; t < diff.u.size(); ++t) {
      du[t] = nu[t] - eu[t];
      dv[t] = nv[t] - ev[t];
      dw[t] = nw[t] - ew[t];
    }
  }
  rec.err_D_l2 = norm_displacement(diff);
  rec.err_D_inf = max_norm_displacement(diff);

  // Reconstructed field: midpoint average of -D divided by the node
  // permittivity, against the analytic gradient of phi.
  Displacement neg(g);
  {
    const double* nu = D.u.data();
    const double* nv = D.v.data();
    const double* nw = D.w.data();
    double* du = neg.u.data();
    double* dv = neg.v.data();
    double* dw = neg.w.data();
    for (std::size_t t = 0; t < neg.u.size(); ++t) {
      du[t] = -nu[t];
      dv[t] = -nv[t];
      dw[t] = -nw[t];
    }
  }
  const NodeVector em = midpoint_average(neg);
  const NodeScalar eps_nodes = sample_node_scalar(mc.eps, g);
  double e_inf = 0.0;
  const int n = g.N;
  const double h = g.h;
  for (int i = 0; i < n; ++i) {
    const double x = i * h;
    for (int j = 0; j < n; ++j) {
      const double y = j * h;
      for (int k = 0; k < n; ++k) {
        const double z = k * h;
        const double ev = eps_nodes(i, j, k);
        e_inf = std::max(
            {e_inf, std::abs(em.x(i, j, k) / ev - mc.gx(x, y, z)),
             std::abs(em.y(i, j, k) / ev - mc.gy(x, y, z)),
             std::abs(em.z(i, j, k) / ev - mc.gz(x, y, z))});
      }
    }
  }
  rec.err_E_inf = e_inf;

  if (conc != nullptr) {
    if (conc->size() != mc.conc.size()) {
      throw std::invalid_argument(
          "compute_errors: species count does not match the case");
    }
    for (std::size_t s = 0; s < conc->size(); ++s) {
      const NodeScalar& cs = (*conc)[s];
      if (!same_grid(cs.grid, g)) {
        throw std::invalid_argument("compute_errors: grid mismatch");
      }
      const NodeScalar exact_c = sample_node_scalar(mc.conc[s], g);
      NodeScalar dc(g);
      const double* a = cs.data();
      const double* b = exact_c.data();
      double* dp = dc.data();
      for (std::size_t t = 0; t < dc.a.size(); ++t) dp[t] = a[t] - b[t];
      rec.err_c_l2.push_back(norm_scalar(dc));
      rec.err_c_inf.push_back(max_norm_scalar(dc));
    }
  }
  return rec;
}

RateTable run_convergence_study(int id, const std::vector<int>& Ns,
                                const SolveOptions& opts,
                                bool interleave_displacement,
                                const std::string& csv_path,
                                IterationReport* finest_trace) {
  if (id < 1 || id > 3) {
    throw std::invalid_argument(
        "run_convergence_study: test id must be 1, 2, or 3");
  }
  std::vector<int> ns = Ns;
  std::sort(ns.begin(), ns.end());
  if (ns.empty()) {
    throw std::invalid_argument(
        "run_convergence_study: need at least one grid size");
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 4) {
      throw std::invalid_argument(
          "run_convergence_study: grid sizes must be at least 4");
    }
    if (i > 0 && ns[i] == ns[i - 1]) {
      throw std::invalid_argument(
          "run_convergence_study: grid sizes must be distinct");
    }
  }

  RateTable table;
  table.test_id = id;
  for (const int n : ns) {
    const ManufacturedProblem mp = manufactured_problem(id, n);
    ErrorRecord rec;
    const auto t0 = std::chrono::steady_clock::now();
    if (mp.is_pb) {
      PBResult r = solve_pb(mp.pb, opts, interleave_displacement);
      const auto t1 = std::chrono::steady_clock::now();
      rec = compute_errors(r.state.D, &r.state.c, mp.c);
      rec.sweeps = r.report.sweeps_used;
      rec.converged = r.report.converged;
      rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
      if (finest_trace != nullptr && n == ns.back()) {
        *finest_trace = std::move(r.report);
      }
    } else {
      PoissonResult r = solve_poisson(mp.poisson, opts);
      const auto t1 = std::chrono::steady_clock::now();
      rec = compute_errors(r.D, nullptr, mp.c);
      rec.sweeps = r.report.sweeps_used;
      rec.converged = r.report.converged;
      rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
      if (finest_trace != nullptr && n == ns.back()) {
        *finest_trace = std::move(r.report);
      }
    }
    table.records.push_back(std::move(rec));
  }

  table.order_D_l2 = pair_orders(table.records, &ErrorRecord::err_D_l2);
  table.order_D_inf = pair_orders(table.records, &ErrorRecord::err_D_inf);
  table.order_E_inf = pair_orders(table.records, &ErrorRecord::err_E_inf);
  if (id == 3 && !table.records.empty()) {
    const std::size_t nsp = table.records.front().err_c_l2.size();
    table.order_c_l2.resize(nsp);
    table.order_c_inf.resize(nsp);
    for (std::size_t s = 0; s < nsp; ++s) {
      for (std::size_t i = 0; i + 1 < table.records.size(); ++i) {
        const double ratio = static_cast<double>(table.records[i + 1].n) /
                             static_cast<double>(table.records[i].n);
        table.order_c_l2[s].push_back(
            std::log(table.records[i].err_c_l2[s] /
                     table.records[i + 1].err_c_l2[s]) /
            std::log(ratio));
        table.order_c_inf[s].push_back(
            std::log(table.records[i].err_c_inf[s] /
                     table.records[i + 1].err_c_inf[s]) /
            std::log(ratio));
      }
    }
  }

  if (!csv_path.empty()) write_study_csv(table, csv_path);
  return table;
}

void write_study_csv(const RateTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_study_csv: cannot open " + path);
  }
  const std::size_t nsp =
      table.records.empty() ? 0 : table.records.front().err_c_l2.size();
  out << "n,h,err_D_l2,err_D_inf,err_E_inf";
  for (std::size_t s = 0; s < nsp; ++s) {
    out << ",err_c" << s + 1 << "_l2,err_c" << s + 1 << "_inf";
  }
  out << ",sweeps,wall_time_s\n";
  for (const ErrorRecord& r : table.records) {
    out << r.n << ',' << format_real(r.h) << ',' << format_real(r.err_D_l2)
        << ',' << format_real(r.err_D_inf) << ',' << format_real(r.err_E_inf);
    for (std::size_t s = 0; s < nsp; ++s) {
      out << ',' << format_real(r.err_c_l2[s]) << ','
          << format_real(r.err_c_inf[s]);
    }
    out << ',' << r.sweeps << ',' << format_real(r.wall_time) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_study_csv: write failed on " + path);
  }
}

void write_trace_csv(const IterationReport& report, bool include_zeta,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_trace_csv: cannot open " + path);
  }
  out << (include_zeta ? "sweep,energy,max_eta,max_zeta,shift_norm,"
                         "gauss_residual_inf\n"
                       : "sweep,energy,max_eta,shift_norm,"
                         "gauss_residual_inf\n");
  for (const SweepRecord& s : report.sweeps) {
    out << s.sweep << ',' << format_real(s.energy) << ','
        << format_real(s.max_abs_eta);
    if (include_zeta) out << ',' << format_real(s.max_abs_zeta);
    out << ',' << format_real(s.shift_norm) << ','
        << format_real(s.gauss_residual_inf) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_trace_csv: write failed on " + path);
  }
}

}  // namespace fdes
