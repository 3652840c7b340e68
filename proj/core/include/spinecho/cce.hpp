#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinecho/hamiltonian.hpp"

// Cluster-correlation expansion of the Hahn-echo coherence of the central
// spin: enumerate clusters, evaluate per-cluster echo traces, assemble the
// truncated product of irreducible correlations, average over bath
// configurations.

namespace spinecho {

struct CceSettings {
  int order = 2;                 // truncation, 1..3
  double pair_cutoff_nm = 1.2;   // max separation inside a cluster
  std::vector<double> tau_grid_s;  // pulse spacing tau; echo forms at 2*tau
  int n_configurations = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;

  // 60 samples, 2*tau uniform on [0, 50 ms]
  static std::vector<double> default_tau_grid(double two_tau_max_s = 50e-3,
                                              int n_points = 60);
};

struct ClusterContribution {
  std::vector<int> cluster_ids;
  std::vector<std::complex<double>> l_values;  // one per tau point
};

struct CurveMetadata {
  double b0_tesla = 0.0;
  double phi_deg = 0.0;
  int order = 0;
  std::string bath_mode;
  double radius_nm = 0.0;
  double abundance = 0.0;
  double pair_cutoff_nm = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> bath_hashes;
  std::vector<std::size_t> spin_counts;
  std::string generator;
  // tau indices where a sub-cluster coherence fell below the division guard
  std::vector<int> guarded_points;
};

struct CoherenceCurve {
  std::vector<double> two_tau_s;
  std::vector<double> l_mean;                    // |L| averaged over configurations
  std::vector<double> l_std;                     // population std over configurations
  std::vector<std::vector<double>> per_config;   // |L| per configuration
  CurveMetadata metadata;
};

// Echo trace of one cluster: precomputes the eigensystems of H(+/-) once and
// evaluates L(2 tau) = Tr[rho exp(iH- t) exp(iH+ t) exp(-iH- t) exp(-iH+ t)]
// with rho = 1/d at any tau. Dimensions up to 8 (order 3).
class EchoKernel {
 public:
  EchoKernel(const Eigen::MatrixXd& h_plus, const Eigen::MatrixXd& h_minus);

  std::complex<double> operator()(double tau_s) const;
  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  std::array<double, 8> eig_plus_{};
  std::array<double, 8> eig_minus_{};
  std::array<double, 64> overlap_{};  // V(-)^T V(+), row-major
};

// Single-shot evaluation with contract checks (Hermiticity, |L| <= 1).
std::complex<double> hahn_echo_cluster(const Eigen::MatrixXd& h_plus,
                                       const Eigen::MatrixXd& h_minus, double tau_s);

struct ClusterSet {
  std::vector<int> singletons;                 // all spin indices
  std::vector<std::array<int, 2>> pairs;       // i<j, separation <= cutoff
  std::vector<std::array<int, 3>> triples;     // i<j<k, all pairs <= cutoff

  std::size_t total() const {
    return singletons.size() + pairs.size() + triples.size();
  }
  // flat view in deterministic order: singletons, pairs, triples
  std::vector<std::vector<int>> as_lists() const;
};

ClusterSet enumerate_clusters(const BathConfiguration& config, const CceSettings& settings);

// Assemble a truncated expansion from explicit cluster traces. Requires every
// sub-cluster of every listed cluster to be present. Irreducible correlations
// with |sub-cluster L| below the guard are taken as 1 and the tau index is
// recorded in the metadata.
inline constexpr double subcluster_guard = 1e-12;
CoherenceCurve cce_assemble(const std::vector<ClusterContribution>& contributions,
                            int order, const std::vector<double>& tau_grid_s);

// One bath configuration end to end; returns |L|(2 tau) and phase bookkeeping
// internally. Deterministic for a fixed configuration and settings,
// independent of the worker count.
struct SingleConfigResult {
  std::vector<double> l_abs;
  std::vector<int> guarded_points;
  std::size_t n_pairs = 0;
  std::size_t n_triples = 0;
};
SingleConfigResult simulate_configuration(const BathConfiguration& config,
                                          const GTensor& g, const FieldConfig& field,
                                          const NuclearSpecies& species,
                                          const CceSettings& settings);

// Full ensemble run: builds n_configurations baths with seeds
// seed, seed+1, ..., simulates each, and averages |L| arithmetically.
CoherenceCurve simulate(const LatticeSpec& lattice, const BathSpec& bath,
                        const GTensor& g, const FieldConfig& field,
                        const NuclearSpecies& species, const CceSettings& settings);

}  // namespace spinecho
