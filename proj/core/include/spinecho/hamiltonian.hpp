#pragma once

#include <Eigen/Core>
#include <vector>

#include "spinecho/crystal.hpp"

// Secular pure-dephasing Hamiltonians for clusters of 183W bath spins
// conditioned on the central Er3+ spin state. All coefficients are angular
// frequencies [rad/s]; positions enter in nm and are converted internally.

namespace spinecho {

struct GTensor {
  double g_perp = 8.38;  // g_aa = g_bb
  double g_par = 1.247;  // g_cc

  void validate() const {
    if (g_perp <= 0.0 || g_par <= 0.0)
      throw InvalidArgument("g-tensor components must be positive");
  }
};

struct FieldConfig {
  double b0_tesla = 0.0672;
  double phi_deg = 46.5;  // in-plane angle from the a axis

  void validate() const {
    if (b0_tesla < 0.0) throw InvalidArgument("B0 must be non-negative");
  }
  double phi_wrapped_deg() const;
  // unit vector along B0 in the crystal frame (ab plane)
  Vec3 direction() const;
};

struct NuclearSpecies {
  double gamma_mhz_per_tesla = 1.8;  // gamma_n / 2pi, signed; 183W default
  // spin is fixed to 1/2 throughout

  double gamma_rad_per_tesla() const;  // gamma_n [rad/s/T]
};

// Effective electron g-factor for an in-plane field: the ab-plane block of
// the tensor is isotropic, so this is g_perp for every phi.
double effective_g(const GTensor& g, const FieldConfig& field);

// Electron Larmor angular frequency [rad/s]
double larmor_omega(const GTensor& g, const FieldConfig& field);

// Nuclear Larmor angular frequency [rad/s]
double nuclear_larmor(const NuclearSpecies& species, const FieldConfig& field);

// z.A.z hyperfine coefficient [rad/s] for a nucleus at r_nm relative to the
// electron, with z along B0. Equals (mu0/4pi) gamma_e gamma_n hbar
// (1 - 3 cos^2 theta)/r^3 for an in-plane field.
double secular_hyperfine(const Vec3& r_nm, const GTensor& g,
                         const FieldConfig& field, const NuclearSpecies& species);

// Secular (A) and pseudo-secular (B) parts of z.A: the hyperfine field seen
// by the nucleus is (B, 0, A) in a frame with z along B0.
struct HyperfineComponents {
  double secular = 0.0;        // A [rad/s]
  double pseudo_secular = 0.0; // B >= 0 [rad/s]
};
HyperfineComponents hyperfine_components(const Vec3& r_nm, const GTensor& g,
                                         const FieldConfig& field,
                                         const NuclearSpecies& species);

// Secular homonuclear dipolar coefficients [rad/s]:
//   b      on Iz_i Iz_j,  b = (mu0/4pi) gamma_n^2 hbar (1-3cos^2 theta)/r^3
//   b_ff   on (I+_i I-_j + I-_i I+_j),  b_ff = -b/4
struct DipolarCoefficients {
  double zz = 0.0;
  double flipflop = 0.0;
};
DipolarCoefficients nuclear_dipolar(const Vec3& ri_nm, const Vec3& rj_nm,
                                    const FieldConfig& field,
                                    const NuclearSpecies& species);

// Coupling table for one cluster: per-spin z.A.z coefficients and per-pair
// secular dipolar coefficients, symmetric in the pair indices.
struct SecularPairHamiltonian {
  std::vector<int> cluster_ids;
  std::vector<double> hyperfine;              // A_i [rad/s]
  Eigen::MatrixXd dipolar_zz;                 // b_ij [rad/s], zero diagonal
  Eigen::MatrixXd dipolar_flipflop;           // b_ff,ij = -b_ij/4
  double nuclear_zeeman = 0.0;                // omega_n [rad/s], common to all spins
};

SecularPairHamiltonian cluster_couplings(const std::vector<int>& cluster,
                                         const BathConfiguration& config,
                                         const GTensor& g, const FieldConfig& field,
                                         const NuclearSpecies& species);

// Conditional bath Hamiltonians H(+), H(-) on the 2^M product basis
// (M = cluster size, supported up to 3). Basis ordering: spin 0 is the most
// significant bit; bit value 0 means m = +1/2. The +/- omega/2 electron term
// is a global phase that cancels in the echo and is dropped here. Matrices
// are real symmetric (flip-flop entries are real in this basis).
struct ConditionalHamiltonians {
  Eigen::MatrixXd h_plus;
  Eigen::MatrixXd h_minus;
};

ConditionalHamiltonians conditional_hamiltonians(const SecularPairHamiltonian& couplings);
ConditionalHamiltonians conditional_hamiltonians(const std::vector<int>& cluster,
                                                 const BathConfiguration& config,
                                                 const GTensor& g,
                                                 const FieldConfig& field,
                                                 const NuclearSpecies& species);

inline constexpr int max_cluster_order = 3;

}  // namespace spinecho
