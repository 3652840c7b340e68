#include "spinecho/cce.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "spinecho/constants.hpp"
#include "spinecho/parallel.hpp"

namespace spinecho {

using cplx = std::complex<double>;

void CceSettings::validate() const {
  if (order < 1 || order > max_cluster_order)
    throw InvalidArgument("cce order must be 1, 2 or 3");
  if (pair_cutoff_nm <= 0.0) throw InvalidArgument("pair cutoff must be positive");
  if (tau_grid_s.empty()) throw InvalidArgument("tau grid is empty");
  for (std::size_t i = 0; i < tau_grid_s.size(); ++i) {
    if (tau_grid_s[i] < 0.0) throw InvalidArgument("tau must be non-negative");
    if (i > 0 && tau_grid_s[i] <= tau_grid_s[i - 1])
      throw InvalidArgument("tau grid must be strictly increasing");
  }
  if (n_configurations < 1)
    throw InvalidArgument("need at least one configuration");
}

std::vector<double> CceSettings::default_tau_grid(double two_tau_max_s, int n_points) {
  std::vector<double> grid(n_points);
  for (int i = 0; i < n_points; ++i)
    grid[i] = 0.5 * two_tau_max_s * static_cast<double>(i) / (n_points - 1);
  return grid;
}

// ---------------------------------------------------------------------------
// Echo kernel

EchoKernel::EchoKernel(const Eigen::MatrixXd& h_plus, const Eigen::MatrixXd& h_minus) {
  if (h_plus.rows() != h_plus.cols() || h_minus.rows() != h_minus.cols() ||
      h_plus.rows() != h_minus.rows())
    throw InvalidArgument("conditional Hamiltonians must be square and same size");
  dim_ = static_cast<int>(h_plus.rows());
  if (dim_ < 1 || dim_ > 8 || (dim_ & (dim_ - 1)) != 0)
    throw InvalidArgument("echo kernel supports dimensions 1, 2, 4, 8");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sp(h_plus);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sm(h_minus);
  const Eigen::MatrixXd w = sm.eigenvectors().transpose() * sp.eigenvectors();
  for (int i = 0; i < dim_; ++i) {
    eig_plus_[i] = sp.eigenvalues()(i);
    eig_minus_[i] = sm.eigenvalues()(i);
    for (int j = 0; j < dim_; ++j) overlap_[i * 8 + j] = w(i, j);
  }
}

// With W = V(-)^T V(+) real and D(+/-) = diag(exp(i e tau)):
//   L = (1/d) Tr[ D- W D+ W^T D-^* W D+^* W^T ]
// Writing A = D- W D+ (so the third factor is A^*):
//   L = (1/d) Tr[ (A W^T A^*) W^T ] = (1/d) sum_ij (A W^T A^*)_ij W_ij
std::complex<double> EchoKernel::operator()(double tau_s) const {
  const int d = dim_;
  if (d == 1) return 1.0;

  cplx dp[8], dm[8];
  for (int i = 0; i < d; ++i) {
    dp[i] = std::polar(1.0, eig_plus_[i] * tau_s);
    dm[i] = std::polar(1.0, eig_minus_[i] * tau_s);
  }

  cplx a[64];  // A = D- W D+
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i * 8 + j] = dm[i] * overlap_[i * 8 + j] * dp[j];

  cplx b[64];  // B = A W^T
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < d; ++k) acc += a[i * 8 + k] * overlap_[j * 8 + k];
      b[i * 8 + j] = acc;
    }
  }

  cplx trace = 0.0;  // Tr[(B A^*) W^T] contracted without forming B A^*
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < d; ++k) acc += b[i * 8 + k] * std::conj(a[k * 8 + j]);
      trace += acc * overlap_[i * 8 + j];
    }
  }
  return trace / static_cast<double>(d);
}

std::complex<double> hahn_echo_cluster(const Eigen::MatrixXd& h_plus,
                                       const Eigen::MatrixXd& h_minus, double tau_s) {
  auto check_symmetric = [](const Eigen::MatrixXd& h) {
    const double scale = std::max(1.0, h.norm());
    if ((h - h.transpose()).norm() > 1e-12 * scale)
      throw InvalidArgument("conditional Hamiltonian is not Hermitian");
  };
  check_symmetric(h_plus);
  check_symmetric(h_minus);
  const cplx l = EchoKernel(h_plus, h_minus)(tau_s);
  if (std::abs(l) > 1.0 + 1e-9)
    throw NumericalFailure("echo trace exceeded unit magnitude");
  return l;
}

// ---------------------------------------------------------------------------
// Cluster enumeration via a uniform cell grid

namespace {

struct CellGrid {
  double cell = 0.0;
  std::unordered_map<std::uint64_t, std::vector<int>> cells;

  static std::uint64_t key(int ix, int iy, int iz) {
    auto enc = [](int v) {
      return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v + (1 << 20)));
    };
    return (enc(ix) << 42) | (enc(iy) << 21) | enc(iz);
  }

  explicit CellGrid(const std::vector<Vec3>& pos, double cell_size) : cell(cell_size) {
    for (int i = 0; i < static_cast<int>(pos.size()); ++i) {
      const auto& p = pos[static_cast<std::size_t>(i)];
      cells[key(coord(p.x()), coord(p.y()), coord(p.z()))].push_back(i);
    }
  }

  int coord(double x) const { return static_cast<int>(std::floor(x / cell)); }

  template <typename Fn>
  void neighbors_of(const Vec3& p, Fn&& fn) const {
    const int cx = coord(p.x()), cy = coord(p.y()), cz = coord(p.z());
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = cells.find(key(cx + dx, cy + dy, cz + dz));
          if (it == cells.end()) continue;
          for (int j : it->second) fn(j);
        }
  }
};

}  // namespace

ClusterSet enumerate_clusters(const BathConfiguration& config, const CceSettings& settings) {
  settings.validate();
  const auto& pos = config.positions;
  const int n = static_cast<int>(pos.size());
  const double cutoff2 = settings.pair_cutoff_nm * settings.pair_cutoff_nm;

  ClusterSet out;
  out.singletons.resize(n);
  for (int i = 0; i < n; ++i) out.singletons[i] = i;
  if (settings.order < 2 || n < 2) return out;

  const CellGrid grid(pos, settings.pair_cutoff_nm);
  std::vector<std::vector<int>> adjacency(n);  // forward neighbors j > i
  for (int i = 0; i < n; ++i) {
    auto& nbrs = adjacency[static_cast<std::size_t>(i)];
    grid.neighbors_of(pos[static_cast<std::size_t>(i)], [&](int j) {
      if (j > i && (pos[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(i)])
                           .squaredNorm() <= cutoff2)
        nbrs.push_back(j);
    });
    std::sort(nbrs.begin(), nbrs.end());
    for (int j : nbrs) out.pairs.push_back({i, j});
  }

  if (settings.order >= 3) {
    for (int i = 0; i < n; ++i) {
      const auto& nbrs = adjacency[static_cast<std::size_t>(i)];
      for (std::size_t a = 0; a < nbrs.size(); ++a) {
        for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
          const int j = nbrs[a], k = nbrs[b];
          if ((pos[static_cast<std::size_t>(k)] - pos[static_cast<std::size_t>(j)])
                  .squaredNorm() <= cutoff2)
            out.triples.push_back({i, j, k});
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<int>> ClusterSet::as_lists() const {
  std::vector<std::vector<int>> lists;
  lists.reserve(total());
  for (int i : singletons) lists.push_back({i});
  for (const auto& p : pairs) lists.push_back({p[0], p[1]});
  for (const auto& t : triples) lists.push_back({t[0], t[1], t[2]});
  return lists;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// log|L~| and phase of one irreducible correlation at one tau point
struct LogAccumulator {
  std::vector<double> log_mag;
  std::vector<double> phase;
  std::vector<std::uint8_t> guarded;

  explicit LogAccumulator(std::size_t n_tau)
      : log_mag(n_tau, 0.0), phase(n_tau, 0.0), guarded(n_tau, 0) {}

  void accumulate(const cplx& value, std::size_t t) {
    const double mag = std::abs(value);
    if (mag < subcluster_guard) {
      // coherence already dead at this tau; count the factor as 1 and flag
      guarded[t] = 1;
      return;
    }
    log_mag[t] += std::log(mag);
    phase[t] += std::arg(value);
  }

  void merge(const LogAccumulator& other) {
    for (std::size_t t = 0; t < log_mag.size(); ++t) {
      log_mag[t] += other.log_mag[t];
      phase[t] += other.phase[t];
      guarded[t] |= other.guarded[t];
    }
  }
};

}  // namespace

CoherenceCurve cce_assemble(const std::vector<ClusterContribution>& contributions,
                            int order, const std::vector<double>& tau_grid_s) {
  const std::size_t n_tau = tau_grid_s.size();
  std::unordered_map<std::uint64_t, const ClusterContribution*> by_key;
  auto key_of = [](const std::vector<int>& ids) {
    std::uint64_t k = 0;
    for (int id : ids) k = k * 1000003ull + static_cast<std::uint64_t>(id) + 1;
    return k;
  };
  for (const auto& c : contributions) {
    auto ids = c.cluster_ids;
    std::sort(ids.begin(), ids.end());
    by_key[key_of(ids)] = &c;
    if (c.l_values.size() != n_tau)
      throw InvalidArgument("cluster contribution length does not match tau grid");
  }

  auto lookup = [&](std::vector<int> ids) -> const ClusterContribution& {
    std::sort(ids.begin(), ids.end());
    const auto it = by_key.find(key_of(ids));
    if (it == by_key.end())
      throw InvalidArgument("missing sub-cluster contribution in assembly");
    return *it->second;
  };

  LogAccumulator acc(n_tau);
  for (const auto& c : contributions) {
    const std::size_t m = c.cluster_ids.size();
    if (static_cast<int>(m) > order) continue;
    for (std::size_t t = 0; t < n_tau; ++t) {
      cplx irreducible = c.l_values[t];
      if (m == 2) {
        const auto& li = lookup({c.cluster_ids[0]});
        const auto& lj = lookup({c.cluster_ids[1]});
        const cplx denom = li.l_values[t] * lj.l_values[t];
        irreducible = std::abs(denom) < subcluster_guard ? cplx(1.0)
                                                         : irreducible / denom;
      } else if (m == 3) {
        const auto& lij = lookup({c.cluster_ids[0], c.cluster_ids[1]});
        const auto& lik = lookup({c.cluster_ids[0], c.cluster_ids[2]});
        const auto& ljk = lookup({c.cluster_ids[1], c.cluster_ids[2]});
        // singleton irreducible parts divide out of both numerator and pairs
        const cplx denom = lij.l_values[t] * lik.l_values[t] * ljk.l_values[t];
        irreducible = std::abs(denom) < subcluster_guard ? cplx(1.0)
                                                         : irreducible / denom;
      }
      acc.accumulate(irreducible, t);
    }
  }

  CoherenceCurve curve;
  curve.two_tau_s.resize(n_tau);
  curve.l_mean.resize(n_tau);
  curve.l_std.assign(n_tau, 0.0);
  for (std::size_t t = 0; t < n_tau; ++t) {
    curve.two_tau_s[t] = 2.0 * tau_grid_s[t];
    curve.l_mean[t] = std::exp(acc.log_mag[t]);
    if (acc.guarded[t]) curve.metadata.guarded_points.push_back(static_cast<int>(t));
  }
  curve.metadata.order = order;
  return curve;
}

// ---------------------------------------------------------------------------
// Single-configuration engine

namespace {

constexpr std::size_t cluster_chunk = 512;

std::vector<cplx> cluster_trace(const std::vector<int>& ids,
                                const BathConfiguration& config, const GTensor& g,
                                const FieldConfig& field, const NuclearSpecies& species,
                                const std::vector<double>& taus) {
  const auto h = conditional_hamiltonians(ids, config, g, field, species);
  const EchoKernel kernel(h.h_plus, h.h_minus);
  std::vector<cplx> out(taus.size());
  for (std::size_t t = 0; t < taus.size(); ++t) out[t] = kernel(taus[t]);
  return out;
}

}  // namespace

SingleConfigResult simulate_configuration(const BathConfiguration& config,
                                          const GTensor& g, const FieldConfig& field,
                                          const NuclearSpecies& species,
                                          const CceSettings& settings) {
  settings.validate();
  const auto& taus = settings.tau_grid_s;
  const std::size_t n_tau = taus.size();
  const auto clusters = enumerate_clusters(config, settings);

  SingleConfigResult result;
  result.n_pairs = clusters.pairs.size();
  result.n_triples = clusters.triples.size();

  // Pair traces are kept: CCE-2 multiplies them in, CCE-3 divides by them.
  // Under the secular model singleton traces are identically 1, so they drop
  // out of every quotient; they are still evaluated in tests via the public
  // hahn_echo_cluster contract.
  std::vector<std::vector<cplx>> pair_traces(clusters.pairs.size());
  LogAccumulator total(n_tau);

  if (settings.order >= 2) {
    parallel_chunks<LogAccumulator>(
        clusters.pairs.size(), cluster_chunk, settings.threads,
        [&](std::size_t lo, std::size_t hi, LogAccumulator& acc) {
          for (std::size_t p = lo; p < hi; ++p) {
            const auto& pr = clusters.pairs[p];
            auto trace = cluster_trace({pr[0], pr[1]}, config, g, field, species, taus);
            for (std::size_t t = 0; t < n_tau; ++t) acc.accumulate(trace[t], t);
            pair_traces[p] = std::move(trace);
          }
        },
        [&](const LogAccumulator& acc) { total.merge(acc); }, LogAccumulator(n_tau));
  }

  if (settings.order >= 3 && !clusters.triples.empty()) {
    // pair index lookup for the divisions
    std::unordered_map<std::uint64_t, std::size_t> pair_index;
    pair_index.reserve(clusters.pairs.size() * 2);
    const auto pk = [&](int i, int j) {
      return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
    };
    for (std::size_t p = 0; p < clusters.pairs.size(); ++p)
      pair_index.emplace(pk(clusters.pairs[p][0], clusters.pairs[p][1]), p);

    parallel_chunks<LogAccumulator>(
        clusters.triples.size(), cluster_chunk, settings.threads,
        [&](std::size_t lo, std::size_t hi, LogAccumulator& acc) {
          for (std::size_t q = lo; q < hi; ++q) {
            const auto& tr = clusters.triples[q];
            const auto trace =
                cluster_trace({tr[0], tr[1], tr[2]}, config, g, field, species, taus);
            const auto& lij = pair_traces[pair_index.at(pk(tr[0], tr[1]))];
            const auto& lik = pair_traces[pair_index.at(pk(tr[0], tr[2]))];
            const auto& ljk = pair_traces[pair_index.at(pk(tr[1], tr[2]))];
            for (std::size_t t = 0; t < n_tau; ++t) {
              const cplx denom = lij[t] * lik[t] * ljk[t];
              const cplx irr =
                  std::abs(denom) < subcluster_guard ? cplx(1.0) : trace[t] / denom;
              acc.accumulate(irr, t);
            }
          }
        },
        [&](const LogAccumulator& acc) { total.merge(acc); }, LogAccumulator(n_tau));
  }

  result.l_abs.resize(n_tau);
  for (std::size_t t = 0; t < n_tau; ++t) {
    result.l_abs[t] = std::exp(total.log_mag[t]);
    if (total.guarded[t]) result.guarded_points.push_back(static_cast<int>(t));
  }
  return result;
}

CoherenceCurve simulate(const LatticeSpec& lattice, const BathSpec& bath,
                        const GTensor& g, const FieldConfig& field,
                        const NuclearSpecies& species, const CceSettings& settings) {
  settings.validate();
  bath.validate();
  const std::size_t n_tau = settings.tau_grid_s.size();

  CoherenceCurve curve;
  curve.two_tau_s.resize(n_tau);
  for (std::size_t t = 0; t < n_tau; ++t)
    curve.two_tau_s[t] = 2.0 * settings.tau_grid_s[t];
  curve.l_mean.assign(n_tau, 0.0);
  curve.l_std.assign(n_tau, 0.0);

  auto& meta = curve.metadata;
  meta.b0_tesla = field.b0_tesla;
  meta.phi_deg = field.phi_deg;
  meta.order = settings.order;
  meta.bath_mode = to_string(bath.mode);
  meta.radius_nm = bath.radius_nm;
  meta.abundance = bath.abundance;
  meta.pair_cutoff_nm = settings.pair_cutoff_nm;
  meta.generator = std::string(rng_name);

  for (int c = 0; c < settings.n_configurations; ++c) {
    BathSpec one = bath;
    one.seed = settings.seed + static_cast<std::uint64_t>(c);
    const auto config = build_bath(lattice, one);
    const auto single = simulate_configuration(config, g, field, species, settings);

    meta.seeds.push_back(one.seed);
    meta.bath_hashes.push_back(config.content_hash());
    meta.spin_counts.push_back(config.size());
    for (int t : single.guarded_points) {
      if (std::find(meta.guarded_points.begin(), meta.guarded_points.end(), t) ==
          meta.guarded_points.end())
        meta.guarded_points.push_back(t);
    }
    curve.per_config.push_back(single.l_abs);
    for (std::size_t t = 0; t < n_tau; ++t) curve.l_mean[t] += single.l_abs[t];
  }

  const double n = static_cast<double>(settings.n_configurations);
  for (std::size_t t = 0; t < n_tau; ++t) curve.l_mean[t] /= n;
  if (settings.n_configurations > 1) {
    for (std::size_t t = 0; t < n_tau; ++t) {
      double ss = 0.0;
      for (const auto& cfg : curve.per_config) {
        const double d = cfg[t] - curve.l_mean[t];
        ss += d * d;
      }
      curve.l_std[t] = std::sqrt(ss / n);
    }
  }
  return curve;
}

}  // namespace spinecho
