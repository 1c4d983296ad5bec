#include "uavtraj/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace uavtraj {

int Mesh::total_points() const {
  int n = 0;
  for (const MeshSegment& s : segments) n += s.degree + 1;
  return n;
}

void Mesh::validate() const {
  if (segments.empty()) {
    throw std::invalid_argument("mesh has no segments");
  }
  double sum = 0.0;
  for (const MeshSegment& s : segments) {
    if (s.degree < 3) {
      throw std::invalid_argument("mesh segment degree must be >= 3");
    }
    if (!(s.duration_fraction > 0.0)) {
      throw std::invalid_argument("mesh duration fractions must be positive");
    }
    sum += s.duration_fraction;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("mesh duration fractions must sum to 1");
  }
}

std::vector<double> Mesh::boundaries() const {
  std::vector<double> b(segments.size() + 1, 0.0);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    b[i + 1] = b[i] + segments[i].duration_fraction;
  }
  b.back() = 1.0;
  return b;
}

Mesh Mesh::single_segment(int degree) {
  Mesh m;
  m.segments.push_back({degree, 1.0});
  return m;
}

Mesh Mesh::uniform(int num_segments, int degree) {
  if (num_segments < 1) {
    throw std::invalid_argument("mesh needs at least one segment");
  }
  Mesh m;
  for (int i = 0; i < num_segments; ++i) {
    m.segments.push_back({degree, 1.0 / num_segments});
  }
  return m;
}

Mesh Mesh::from_fractions(const std::vector<double>& fractions, int degree) {
  Mesh m;
  for (double f : fractions) m.segments.push_back({degree, f});
  m.validate();
  return m;
}

}  // namespace uavtraj
