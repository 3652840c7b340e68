#include "spinecho/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "spinecho/constants.hpp"
#include "spinecho/rng.hpp"

namespace spinecho {

void LatticeSpec::validate() const {
  if (a_nm <= 0.0 || c_nm <= 0.0)
    throw InvalidArgument("lattice constants must be positive");
  for (const auto* basis : {&w_basis, &ca_basis}) {
    for (const auto& f : *basis) {
      for (int k = 0; k < 3; ++k) {
        if (f[k] < 0.0 || f[k] >= 1.0)
          throw InvalidArgument("fractional coordinates must lie in [0,1)");
      }
    }
  }
}

double LatticeSpec::nearest_ca_w_nm() const { return a_nm / std::sqrt(2.0); }

double LatticeSpec::nearest_w_w_nm() const {
  return std::sqrt(a_nm * a_nm / 4.0 + c_nm * c_nm / 16.0);
}

void BathSpec::validate() const {
  if (abundance < 0.0 || abundance > 1.0)
    throw InvalidArgument("abundance must lie in [0,1]");
  if (radius_nm <= 0.0) throw InvalidArgument("bath radius must be positive");
}

std::uint64_t BathConfiguration::content_hash() const {
  // FNV-1a over the position bytes; identifies a configuration in metadata
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffull;
      h *= 1099511628211ull;
    }
  };
  for (const auto& p : positions) {
    mix(p.x());
    mix(p.y());
    mix(p.z());
  }
  return h;
}

std::vector<Vec3> w_sites_within(const LatticeSpec& spec, double radius_nm) {
  spec.validate();
  const Vec3 scale(spec.a_nm, spec.a_nm, spec.c_nm);
  const Vec3 origin = spec.ca_basis.front().cwiseProduct(scale);

  const int na = static_cast<int>(std::ceil(radius_nm / spec.a_nm)) + 2;
  const int nc = static_cast<int>(std::ceil(radius_nm / spec.c_nm)) + 2;
  const double r2 = radius_nm * radius_nm;

  std::vector<Vec3> sites;
  for (int i = -na; i <= na; ++i) {
    for (int j = -na; j <= na; ++j) {
      for (int k = -nc; k <= nc; ++k) {
        const Vec3 cell(static_cast<double>(i), static_cast<double>(j),
                        static_cast<double>(k));
        for (const auto& frac : spec.w_basis) {
          const Vec3 pos = (cell + frac).cwiseProduct(scale) - origin;
          if (pos.squaredNorm() <= r2) sites.push_back(pos);
        }
      }
    }
  }
  std::sort(sites.begin(), sites.end(), [](const Vec3& a, const Vec3& b) {
    const double ra = a.squaredNorm(), rb = b.squaredNorm();
    if (ra != rb) return ra < rb;
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  });
  return sites;
}

BathConfiguration build_lattice_bath(const LatticeSpec& spec, const BathSpec& bath) {
  spec.validate();
  bath.validate();
  if (bath.mode != BathMode::lattice)
    throw InvalidArgument("build_lattice_bath requires lattice mode");

  const auto sites = w_sites_within(spec, bath.radius_nm);
  Rng rng(bath.seed);

  BathConfiguration config;
  config.seed = bath.seed;
  config.generator = std::string(rng_name);
  config.mode = BathMode::lattice;
  config.positions.reserve(static_cast<std::size_t>(
      bath.abundance * static_cast<double>(sites.size()) + 16));
  for (const auto& site : sites) {
    if (rng.uniform() < bath.abundance) config.positions.push_back(site);
  }
  return config;
}

BathConfiguration build_amorphous_bath(const LatticeSpec& spec, const BathSpec& bath) {
  spec.validate();
  bath.validate();
  if (bath.mode != BathMode::amorphous)
    throw InvalidArgument("build_amorphous_bath requires amorphous mode");

  const double hard_core = spec.nearest_ca_w_nm();
  const double radius = bath.radius_nm;
  const double volume = 4.0 / 3.0 * phys::pi * radius * radius * radius;
  const double mean_count = bath.abundance * spec.w_density() * volume;

  Rng rng(bath.seed);
  const std::uint64_t count = rng.poisson(mean_count);

  BathConfiguration config;
  config.seed = bath.seed;
  config.generator = std::string(rng_name);
  config.mode = BathMode::amorphous;
  config.hard_core_nm = hard_core;
  config.positions.reserve(count);
  const double r2_max = radius * radius;
  const double r2_min = hard_core * hard_core;
  while (config.positions.size() < count) {
    const Vec3 p(rng.uniform(-radius, radius), rng.uniform(-radius, radius),
                 rng.uniform(-radius, radius));
    const double r2 = p.squaredNorm();
    if (r2 <= r2_max && r2 >= r2_min) config.positions.push_back(p);
  }
  return config;
}

std::string to_string(BathMode mode) {
  return mode == BathMode::lattice ? "lattice" : "amorphous";
}

BathMode bath_mode_from_string(const std::string& name) {
  if (name == "lattice") return BathMode::lattice;
  if (name == "amorphous") return BathMode::amorphous;
  throw InvalidArgument("unknown bath mode: " + name);
}

}  // namespace spinecho
