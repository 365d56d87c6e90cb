#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "superheat/common.hpp"

namespace superheat {

struct BoundarySpec {
  enum class Kind { Periodic, ConstantExtension };
  Kind kind = Kind::Periodic;
  double value = 0.0;

  static BoundarySpec periodic() { return {Kind::Periodic, 0.0}; }
  static BoundarySpec constant(double v) { return {Kind::ConstantExtension, v}; }
  bool periodic_p() const { return kind == Kind::Periodic; }
};

// A real-valued function sampled on a uniform rectangular grid. Dimension is
// 1..3; values are stored row-major with the last axis fastest.
class GridField {
public:
  GridField() = default;

  GridField(int dim, std::array<double, 3> origin, double spacing,
            std::array<int, 3> extents, BoundarySpec boundary)
      : dim_(dim), origin_(origin), spacing_(spacing), extents_(extents),
        boundary_(boundary) {
    if (dim < 1 || dim > 3) throw ConfigError("GridField: dim must be 1..3");
    if (!(spacing > 0)) throw ConfigError("GridField: spacing must be > 0");
    for (int d = dim; d < 3; ++d) extents_[d] = 1;
    std::size_t n = 1;
    for (int d = 0; d < 3; ++d) {
      if (extents_[d] < 1) throw ConfigError("GridField: empty extent");
      n *= static_cast<std::size_t>(extents_[d]);
    }
    values_.assign(n, 0.0);
  }

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const std::array<double, 3>& origin() const { return origin_; }
  const std::array<int, 3>& extents() const { return extents_; }
  const BoundarySpec& boundary() const { return boundary_; }
  void set_boundary(BoundarySpec b) { boundary_ = b; }

  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double cell_volume() const {
    double v = 1;
    for (int d = 0; d < dim_; ++d) v *= spacing_;
    return v;
  }

  double axis_length(int d) const { return extents_[d] * spacing_; }

  std::size_t flat_index(std::array<int, 3> idx) const {
    return (static_cast<std::size_t>(idx[0]) * extents_[1] + idx[1]) *
               extents_[2] +
           idx[2];
  }

  std::array<int, 3> unflatten(std::size_t flat) const {
    std::array<int, 3> idx{};
    idx[2] = static_cast<int>(flat % extents_[2]);
    flat /= extents_[2];
    idx[1] = static_cast<int>(flat % extents_[1]);
    idx[0] = static_cast<int>(flat / extents_[1]);
    return idx;
  }

  double& at(std::array<int, 3> idx) { return values_[flat_index(idx)]; }
  double at(std::array<int, 3> idx) const { return values_[flat_index(idx)]; }

  std::array<double, 3> node(std::array<int, 3> idx) const {
    std::array<double, 3> x{};
    for (int d = 0; d < dim_; ++d) x[d] = origin_[d] + idx[d] * spacing_;
    return x;
  }

  // Value at an integer index that may lie outside the box; resolves by wrap
  // or constant extension.
  double value_extended(std::array<int, 3> idx) const {
    for (int d = 0; d < dim_; ++d) {
      int n = extents_[d];
      if (idx[d] < 0 || idx[d] >= n) {
        if (boundary_.periodic_p()) {
          idx[d] %= n;
          if (idx[d] < 0) idx[d] += n;
        } else {
          return boundary_.value;
        }
      }
    }
    return at(idx);
  }

  // Multi-linear interpolation at an arbitrary point, honoring the boundary.
  double sample(std::array<double, 3> x) const {
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int d = 0; d < dim_; ++d) {
      double u = (x[d] - origin_[d]) / spacing_;
      double fl = std::floor(u);
      base[d] = static_cast<int>(fl);
      frac[d] = u - fl;
    }
    double acc = 0;
    int corners = 1 << dim_;
    for (int c = 0; c < corners; ++c) {
      double w = 1;
      std::array<int, 3> idx = base;
      for (int d = 0; d < dim_; ++d) {
        if (c & (1 << d)) {
          idx[d] += 1;
          w *= frac[d];
        } else {
          w *= 1 - frac[d];
        }
      }
      if (w != 0) acc += w * value_extended(idx);
    }
    return acc;
  }

  double max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::max(m, v);
    return m;
  }
  double min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::min(m, v);
    return m;
  }
  double max_abs() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool same_geometry(const GridField& o) const {
    return dim_ == o.dim_ && origin_ == o.origin_ && spacing_ == o.spacing_ &&
           extents_ == o.extents_;
  }

  void fill(const std::function<double(std::array<double, 3>)>& fn) {
    for (std::size_t i = 0; i < values_.size(); ++i)
      values_[i] = fn(node(unflatten(i)));
  }

  // Every-other-node decimation; spacing doubles. Extents must be even.
  GridField decimate() const {
    std::array<int, 3> ne = extents_;
    for (int d = 0; d < dim_; ++d) {
      if (extents_[d] % 2 != 0)
        throw InsufficientLevels("decimate: extents must be even");
      ne[d] = extents_[d] / 2;
    }
    GridField out(dim_, origin_, spacing_ * 2, ne, boundary_);
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto idx = out.unflatten(i);
      std::array<int, 3> src{};
      for (int d = 0; d < 3; ++d) src[d] = idx[d] * (d < dim_ ? 2 : 1);
      out.values()[i] = at(src);
    }
    return out;
  }

  void check_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) throw Error("GridField: non-finite value");
  }

  // -------------------------------------------------------------------------
  // serialization: text header followed by a csv or raw little-endian payload
  // -------------------------------------------------------------------------

  void save(const std::string& path, bool binary = true) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for write: " + path);
    out << "superheat-gridfield 1\n";
    out << "dim " << dim_ << "\n";
    out << "origin";
    char buf[64];
    for (int d = 0; d < dim_; ++d) {
      std::snprintf(buf, sizeof buf, " %.17g", origin_[d]);
      out << buf;
    }
    out << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spacing_);
    out << "spacing " << buf << "\n";
    out << "extents";
    for (int d = 0; d < dim_; ++d) out << " " << extents_[d];
    out << "\n";
    if (boundary_.periodic_p()) {
      out << "boundary periodic\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", boundary_.value);
      out << "boundary constant " << buf << "\n";
    }
    if (binary) {
      out << "payload binary " << values_.size() << "\n";
      out.write(reinterpret_cast<const char*>(values_.data()),
                static_cast<std::streamsize>(values_.size() * sizeof(double)));
    } else {
      out << "payload csv " << values_.size() << "\n";
      for (double v : values_) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << "\n";
      }
    }
  }

  static GridField load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for read: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "superheat-gridfield" || version != 1)
      throw ConfigError("not a gridfield file: " + path);
    int dim = 0;
    std::array<double, 3> origin{};
    double spacing = 0;
    std::array<int, 3> extents{1, 1, 1};
    BoundarySpec boundary;
    std::string key;
    std::string payload_kind;
    std::size_t count = 0;
    while (in >> key) {
      if (key == "dim") {
        in >> dim;
      } else if (key == "origin") {
        for (int d = 0; d < dim; ++d) in >> origin[d];
      } else if (key == "spacing") {
        in >> spacing;
      } else if (key == "extents") {
        for (int d = 0; d < dim; ++d) in >> extents[d];
      } else if (key == "boundary") {
        std::string k;
        in >> k;
        if (k == "periodic") {
          boundary = BoundarySpec::periodic();
        } else if (k == "constant") {
          double v;
          in >> v;
          boundary = BoundarySpec::constant(v);
        } else {
          throw ConfigError("bad boundary kind: " + k);
        }
      } else if (key == "payload") {
        in >> payload_kind >> count;
        break;
      } else {
        throw ConfigError("unknown gridfield header key: " + key);
      }
    }
    GridField g(dim, origin, spacing, extents, boundary);
    if (g.size() != count)
      throw ConfigError("gridfield payload count mismatch");
    if (payload_kind == "binary") {
      in.get();  // newline after the header line
      in.read(reinterpret_cast<char*>(g.values().data()),
              static_cast<std::streamsize>(count * sizeof(double)));
      if (!in) throw ConfigError("gridfield binary payload truncated");
    } else if (payload_kind == "csv") {
      for (std::size_t i = 0; i < count; ++i)
        if (!(in >> g.values()[i]))
          throw ConfigError("gridfield csv payload truncated");
    } else {
      throw ConfigError("unknown payload kind: " + payload_kind);
    }
    return g;
  }

private:
  int dim_ = 1;
  std::array<double, 3> origin_{};
  double spacing_ = 1.0;
  std::array<int, 3> extents_{1, 1, 1};
  BoundarySpec boundary_;
  std::vector<double> values_;
};

// Pointwise map: out_i = fn(in_i) on the same geometry.
inline GridField map_field(const GridField& in,
                           const std::function<double(double)>& fn) {
  GridField out = in;
  for (double& v : out.values()) v = fn(v);
  return out;
}

}  // namespace superheat
