#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace mgamsgd {

enum class Face { XMin = 0, XMax = 1, YMin = 2, YMax = 3, ZMin = 4, ZMax = 5 };

Eigen::Vector3d face_normal(Face face);

/// Structured unit-cube grid: nx*ny*nz tensor points plus a boundary
/// densification weight beta_i realized as point duplication.
struct GridSpec {
  int nx = 5;
  int ny = 5;
  int nz = 5;
  double beta_i = 0.0;

  void validate() const;
};

struct DirichletSample {
  Eigen::Vector3d point;
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  std::array<bool, 3> mask = {false, false, false};  // which components are prescribed
};

struct NeumannSample {
  Eigen::Vector3d point;
  Eigen::Vector3d normal;
  Face face;
  Eigen::Vector3d t0 = Eigen::Vector3d::Zero();
};

/// Collocation sets. `interior` is the full volume list (boundary points
/// included); the boundary subsets are drawn from it, each boundary point
/// assigned to exactly one face by the priority x=0, x=1, y=0, y=1, z=0, z=1.
struct SampleSet {
  std::vector<Eigen::Vector3d> interior;
  std::vector<DirichletSample> dirichlet;  // the x=0 face
  std::vector<NeumannSample> neumann;      // the other five faces
};

/// Uniform tensor grid with coordinates i/(n-1) per axis, in lexicographic
/// (ix, iy, iz) order. A positive beta_i adds round(beta_i) extra copies of
/// every boundary point to both the volume list and its boundary subset,
/// which realizes the boundary-to-volume weighting ratio exactly.
SampleSet generate_grid(const GridSpec& spec);

/// Weighted boundary-to-volume point ratio realized by generate_grid
/// (evaluated at the rounded duplication count).
double boundary_ratio(const GridSpec& spec);

/// Plain n^3 lattice over the unit cube, for field evaluation and export.
std::vector<Eigen::Vector3d> cube_lattice(int n);

}  // namespace mgamsgd
