#include "spinecho/hamiltonian.hpp"

#include <cmath>

#include "spinecho/constants.hpp"

namespace spinecho {

namespace {
constexpr double nm = 1e-9;
}

double FieldConfig::phi_wrapped_deg() const {
  double phi = std::fmod(phi_deg, 360.0);
  if (phi < 0.0) phi += 360.0;
  return phi;
}

Vec3 FieldConfig::direction() const {
  const double phi = phi_deg * phys::deg_to_rad;
  return Vec3(std::cos(phi), std::sin(phi), 0.0);
}

double NuclearSpecies::gamma_rad_per_tesla() const {
  return phys::two_pi * gamma_mhz_per_tesla * 1e6;
}

double effective_g(const GTensor& g, const FieldConfig& field) {
  g.validate();
  field.validate();
  return g.g_perp;
}

double larmor_omega(const GTensor& g, const FieldConfig& field) {
  return effective_g(g, field) * phys::mu_bohr * field.b0_tesla / phys::hbar;
}

double nuclear_larmor(const NuclearSpecies& species, const FieldConfig& field) {
  return species.gamma_rad_per_tesla() * field.b0_tesla;
}

HyperfineComponents hyperfine_components(const Vec3& r_nm, const GTensor& g,
                                         const FieldConfig& field,
                                         const NuclearSpecies& species) {
  const double r = r_nm.norm();
  if (r <= 0.0)
    throw InvalidArgument("hyperfine coupling undefined at zero separation");

  // For B0 in the ab plane, z.g = g_perp z, so z.A reduces to the point
  // dipole field of the electron moment g_perp mu_B along z:
  //   z.A = d [z - 3 cos(theta) r_hat],  d = (mu0/4pi) gamma_e gamma_n hbar / r^3
  const double gamma_e = g.g_perp * phys::mu_bohr / phys::hbar;
  const double gamma_n = species.gamma_rad_per_tesla();
  const double r_m = r * nm;
  const double d = phys::mu0 / (4.0 * phys::pi) * gamma_e * gamma_n * phys::hbar /
                   (r_m * r_m * r_m);
  const double cos_theta = r_nm.dot(field.direction()) / r;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));

  HyperfineComponents out;
  out.secular = d * (1.0 - 3.0 * cos_theta * cos_theta);
  out.pseudo_secular = std::abs(3.0 * d * sin_theta * cos_theta);
  return out;
}

double secular_hyperfine(const Vec3& r_nm, const GTensor& g,
                         const FieldConfig& field, const NuclearSpecies& species) {
  return hyperfine_components(r_nm, g, field, species).secular;
}

DipolarCoefficients nuclear_dipolar(const Vec3& ri_nm, const Vec3& rj_nm,
                                    const FieldConfig& field,
                                    const NuclearSpecies& species) {
  const Vec3 rij = rj_nm - ri_nm;
  const double r = rij.norm();
  if (r <= 0.0) throw InvalidArgument("nuclear dipolar coupling at coincident positions");

  const double gamma_n = species.gamma_rad_per_tesla();
  const double r_m = r * nm;
  const double cos_theta = rij.dot(field.direction()) / r;

  DipolarCoefficients out;
  out.zz = phys::mu0 / (4.0 * phys::pi) * gamma_n * gamma_n * phys::hbar *
           (1.0 - 3.0 * cos_theta * cos_theta) / (r_m * r_m * r_m);
  out.flipflop = -0.25 * out.zz;
  return out;
}

SecularPairHamiltonian cluster_couplings(const std::vector<int>& cluster,
                                         const BathConfiguration& config,
                                         const GTensor& g, const FieldConfig& field,
                                         const NuclearSpecies& species) {
  const int n = static_cast<int>(cluster.size());
  if (n > max_cluster_order)
    throw InvalidArgument("cluster order beyond supported truncation");

  SecularPairHamiltonian out;
  out.cluster_ids = cluster;
  out.hyperfine.resize(n);
  out.dipolar_zz = Eigen::MatrixXd::Zero(n, n);
  out.dipolar_flipflop = Eigen::MatrixXd::Zero(n, n);
  out.nuclear_zeeman = nuclear_larmor(species, field);

  for (int i = 0; i < n; ++i) {
    const Vec3& ri = config.positions.at(cluster[i]);
    out.hyperfine[i] = secular_hyperfine(ri, g, field, species);
    for (int j = i + 1; j < n; ++j) {
      const auto d = nuclear_dipolar(ri, config.positions.at(cluster[j]), field, species);
      out.dipolar_zz(i, j) = out.dipolar_zz(j, i) = d.zz;
      out.dipolar_flipflop(i, j) = out.dipolar_flipflop(j, i) = d.flipflop;
    }
  }
  return out;
}

ConditionalHamiltonians conditional_hamiltonians(const SecularPairHamiltonian& c) {
  const int n = static_cast<int>(c.hyperfine.size());
  if (n > max_cluster_order)
    throw InvalidArgument("cluster order beyond supported truncation");
  const int dim = 1 << n;

  // m_i = +1/2 for bit value 0, -1/2 for bit value 1 (spin 0 = MSB)
  auto mz = [n](int state, int spin) {
    return ((state >> (n - 1 - spin)) & 1) ? -0.5 : 0.5;
  };

  ConditionalHamiltonians out;
  out.h_plus = Eigen::MatrixXd::Zero(dim, dim);
  out.h_minus = Eigen::MatrixXd::Zero(dim, dim);

  for (int s = 0; s < dim; ++s) {
    double diag_bath = 0.0;  // nuclear Zeeman + zz dipolar, same in both branches
    double diag_hf = 0.0;    // sum_i A_i m_i, enters with +/- 1/2
    for (int i = 0; i < n; ++i) {
      diag_bath += c.nuclear_zeeman * mz(s, i);
      diag_hf += c.hyperfine[static_cast<std::size_t>(i)] * mz(s, i);
      for (int j = i + 1; j < n; ++j)
        diag_bath += c.dipolar_zz(i, j) * mz(s, i) * mz(s, j);
    }
    out.h_plus(s, s) = diag_bath + 0.5 * diag_hf;
    out.h_minus(s, s) = diag_bath - 0.5 * diag_hf;

    // flip-flop: |..up_i..down_j..> <-> |..down_i..up_j..>
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool bi = (s >> (n - 1 - i)) & 1;
        const bool bj = (s >> (n - 1 - j)) & 1;
        if (bi == bj) continue;
        const int t = s ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j));
        if (t < s) continue;
        out.h_plus(s, t) = out.h_plus(t, s) = c.dipolar_flipflop(i, j);
        out.h_minus(s, t) = out.h_minus(t, s) = c.dipolar_flipflop(i, j);
      }
    }
  }
  return out;
}

ConditionalHamiltonians conditional_hamiltonians(const std::vector<int>& cluster,
                                                 const BathConfiguration& config,
                                                 const GTensor& g,
                                                 const FieldConfig& field,
                                                 const NuclearSpecies& species) {
  return conditional_hamiltonians(cluster_couplings(cluster, config, g, field, species));
}

}  // namespace spinecho
