#include "mgamsgd/sampling.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace mgamsgd {

Eigen::Vector3d face_normal(Face face) {
  switch (face) {
    case Face::XMin: return {-1, 0, 0};
    case Face::XMax: return {1, 0, 0};
    case Face::YMin: return {0, -1, 0};
    case Face::YMax: return {0, 1, 0};
    case Face::ZMin: return {0, 0, -1};
    case Face::ZMax: return {0, 0, 1};
  }
  throw std::invalid_argument("face_normal: bad face");
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2 || nz < 2)
    throw std::invalid_argument("grid: nx, ny, nz must be >= 2");
  if (!(beta_i >= 0)) throw std::invalid_argument("grid: beta_i must be >= 0");
}

namespace {

std::optional<Face> owning_face(int ix, int iy, int iz, const GridSpec& g) {
  if (ix == 0) return Face::XMin;
  if (ix == g.nx - 1) return Face::XMax;
  if (iy == 0) return Face::YMin;
  if (iy == g.ny - 1) return Face::YMax;
  if (iz == 0) return Face::ZMin;
  if (iz == g.nz - 1) return Face::ZMax;
  return std::nullopt;
}

}  // namespace

SampleSet generate_grid(const GridSpec& spec) {
  spec.validate();
  const long extra = std::lround(spec.beta_i);

  SampleSet set;
  for (int ix = 0; ix < spec.nx; ++ix) {
    for (int iy = 0; iy < spec.ny; ++iy) {
      for (int iz = 0; iz < spec.nz; ++iz) {
        const Eigen::Vector3d p(static_cast<double>(ix) / (spec.nx - 1),
                                static_cast<double>(iy) / (spec.ny - 1),
                                static_cast<double>(iz) / (spec.nz - 1));
        const auto face = owning_face(ix, iy, iz, spec);
        const long copies = 1 + (face ? extra : 0);
        for (long c = 0; c < copies; ++c) {
          set.interior.push_back(p);
          if (!face) continue;
          if (*face == Face::XMin) {
            set.dirichlet.push_back({p});
          } else {
            set.neumann.push_back({p, face_normal(*face), *face});
          }
        }
      }
    }
  }
  return set;
}

std::vector<Eigen::Vector3d> cube_lattice(int n) {
  if (n < 2) throw std::invalid_argument("cube_lattice: n must be >= 2");
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(n) * n * n);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz)
        pts.emplace_back(static_cast<double>(ix) / (n - 1),
                         static_cast<double>(iy) / (n - 1),
                         static_cast<double>(iz) / (n - 1));
  return pts;
}

double boundary_ratio(const GridSpec& spec) {
  spec.validate();
  const double n_vu = static_cast<double>(spec.nx) * spec.ny * spec.nz;
  const double n_interior = static_cast<double>(std::max(spec.nx - 2, 0)) *
                            std::max(spec.ny - 2, 0) * std::max(spec.nz - 2, 0);
  const double n_bu = n_vu - n_interior;
  const double k = static_cast<double>(std::lround(spec.beta_i));
  return (n_bu + k * n_bu) / (n_vu + k * n_bu);
}

}  // namespace mgamsgd
