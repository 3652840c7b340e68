#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "spinecho/errors.hpp"

// CaWO4 tungsten sublattice around an Er3+ dopant on a Ca site, and
// density-matched amorphous baths of 183W nuclear spins.

namespace spinecho {

using Vec3 = Eigen::Vector3d;

// Scheelite cell, I4_1/a origin choice 2: W on 4a, Ca on 4b.
struct LatticeSpec {
  double a_nm = 0.524;
  double c_nm = 1.137;
  std::vector<Vec3> w_basis = {{0.0, 0.25, 0.125},
                               {0.0, 0.75, 0.375},
                               {0.5, 0.75, 0.625},
                               {0.5, 0.25, 0.875}};
  std::vector<Vec3> ca_basis = {{0.0, 0.25, 0.625},
                                {0.0, 0.75, 0.875},
                                {0.5, 0.75, 0.125},
                                {0.5, 0.25, 0.375}};

  void validate() const;

  // W site number density [nm^-3], 4 per conventional cell
  double w_density() const { return 4.0 / (a_nm * a_nm * c_nm); }
  // closest Ca-W separation, a/sqrt(2) in scheelite
  double nearest_ca_w_nm() const;
  // closest W-W separation, sqrt(a^2/4 + c^2/16)
  double nearest_w_w_nm() const;
};

enum class BathMode { lattice, amorphous };

struct BathSpec {
  double abundance = 0.145;   // 183W isotopic fraction p_n
  double radius_nm = 11.0;    // bath sphere radius around the central spin
  BathMode mode = BathMode::lattice;
  std::uint64_t seed = 0;
  double er_concentration_cm3 = 0.9e13;  // total [Er3+], all isotopes

  void validate() const;
};

struct BathConfiguration {
  Vec3 central_position{0.0, 0.0, 0.0};   // nm; origin of the bath frame
  std::vector<Vec3> positions;            // nm, relative to the Er site
  std::string species = "183W";
  // provenance
  std::uint64_t seed = 0;
  std::string generator;
  BathMode mode = BathMode::lattice;
  double hard_core_nm = 0.0;  // amorphous exclusion radius around the origin

  std::size_t size() const { return positions.size(); }
  std::uint64_t content_hash() const;
};

// All W sites within radius_nm of the Er substitution site, sorted by
// (distance, x, y, z) so enumeration order is reproducible.
std::vector<Vec3> w_sites_within(const LatticeSpec& spec, double radius_nm);

// Each W site within the sphere is kept independently with probability
// p_n. Zero candidate sites is a valid empty bath, not an error.
BathConfiguration build_lattice_bath(const LatticeSpec& spec, const BathSpec& bath);

// Spin count ~ Poisson(p_n * w_density * sphere volume); positions uniform in
// the sphere excluding a hard core of nearest_ca_w_nm around the origin.
BathConfiguration build_amorphous_bath(const LatticeSpec& spec, const BathSpec& bath);

inline BathConfiguration build_bath(const LatticeSpec& spec, const BathSpec& bath) {
  return bath.mode == BathMode::lattice ? build_lattice_bath(spec, bath)
                                        : build_amorphous_bath(spec, bath);
}

std::string to_string(BathMode mode);
BathMode bath_mode_from_string(const std::string& name);

}  // namespace spinecho
