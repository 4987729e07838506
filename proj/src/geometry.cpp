#include "multimapper/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "multimapper/errors.hpp"

namespace mm {
namespace {

std::vector<Vec> to_columns(const std::vector<Vec>& rows, std::size_t& count) {
  count = rows.size();
  if (rows.empty()) return {};
  const std::size_t dim = rows.front().size();
  std::vector<Vec> columns(dim, Vec(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw Error(ErrorKind::ParseError, "row " + std::to_string(i) + " has " +
                                             std::to_string(rows[i].size()) + " values, expected " +
                                             std::to_string(dim));
    }
    for (std::size_t k = 0; k < dim; ++k) columns[k][i] = rows[i][k];
  }
  return columns;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

PointCloud::PointCloud(const std::vector<Vec>& rows) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "point cloud must contain a point");
  if (rows.front().empty()) throw Error(ErrorKind::InvalidArgument, "points must have dimension >= 1");
  columns_ = to_columns(rows, count_);
}

Vec PointCloud::point(std::size_t i) const {
  Vec p(dim());
  for (std::size_t k = 0; k < dim(); ++k) p[k] = columns_[k][i];
  return p;
}

std::string PointCloud::content_hash() const {
  std::string bytes;
  bytes.reserve(16 + count_ * dim() * sizeof(double));
  const std::uint64_t header[2] = {count_, dim()};
  bytes.append(reinterpret_cast<const char*>(header), sizeof(header));
  for (std::size_t i = 0; i < count_; ++i) {
    for (std::size_t k = 0; k < dim(); ++k) {
      const double v = columns_[k][i];
      bytes.append(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  return fnv1a_hex(bytes);
}

LensMap::LensMap(const std::vector<Vec>& rows) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "lens must contain a value");
  const std::size_t d = rows.front().size();
  if (d < 1 || d > 2) {
    throw Error(ErrorKind::InvalidArgument, "lens dimension must be 1 or 2, got " + std::to_string(d));
  }
  columns_ = to_columns(rows, count_);
}

Vec LensMap::value(std::size_t i) const {
  Vec v(dim());
  for (std::size_t k = 0; k < dim(); ++k) v[k] = columns_[k][i];
  return v;
}

LensMap lens_coordinate(const PointCloud& pc, std::span<const std::size_t> axes) {
  if (axes.empty() || axes.size() > 2) {
    throw Error(ErrorKind::InvalidLensAxis, "select one or two axes");
  }
  for (const std::size_t a : axes) {
    if (a >= pc.dim()) {
      throw Error(ErrorKind::InvalidLensAxis,
                  "axis " + std::to_string(a) + " out of range for dimension " + std::to_string(pc.dim()));
    }
  }
  std::vector<Vec> rows(pc.size(), Vec(axes.size()));
  for (std::size_t i = 0; i < pc.size(); ++i) {
    for (std::size_t k = 0; k < axes.size(); ++k) rows[i][k] = pc.at(i, axes[k]);
  }
  return LensMap(rows);
}

LensMap lens_pca(const PointCloud& pc, std::size_t d) {
  if (d < 1 || d > 2) throw Error(ErrorKind::InvalidArgument, "pca lens dimension must be 1 or 2");
  const auto n = static_cast<Eigen::Index>(pc.size());
  const auto dim = static_cast<Eigen::Index>(pc.dim());
  if (static_cast<std::size_t>(dim) < d || pc.size() < d) {
    throw Error(ErrorKind::DegenerateLens, "not enough points or axes for the requested components");
  }
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto col = pc.column(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) x(i, k) = col[static_cast<std::size_t>(i)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(std::max<Eigen::Index>(1, n - 1));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const double scale = std::max(1.0, std::abs(evals(dim - 1)));
  for (std::size_t c = 0; c < d; ++c) {
    if (!(evals(dim - 1 - static_cast<Eigen::Index>(c)) > 1e-12 * scale)) {
      throw Error(ErrorKind::DegenerateLens, "data spread has rank below " + std::to_string(d));
    }
  }
  std::vector<Vec> rows(pc.size(), Vec(d));
  for (std::size_t c = 0; c < d; ++c) {
    Eigen::VectorXd axis = solver.eigenvectors().col(dim - 1 - static_cast<Eigen::Index>(c));
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    const Eigen::VectorXd proj = x * axis;
    for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)][c] = proj(i);
  }
  return LensMap(rows);
}

BoundingBox lens_bounds(const LensMap& lens) {
  BoundingBox box;
  for (std::size_t k = 0; k < lens.dim(); ++k) {
    const auto col = lens.column(k);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    box.lo.push_back(*mn);
    box.hi.push_back(*mx);
  }
  return box;
}

BoundingBox lens_bounds(const LensMap& lens, std::span<const PointIndex> subset) {
  if (subset.empty()) throw Error(ErrorKind::InvalidArgument, "bounds of an empty subset");
  BoundingBox box;
  for (std::size_t k = 0; k < lens.dim(); ++k) {
    double mn = lens.at(static_cast<std::size_t>(subset.front()), k);
    double mx = mn;
    for (const PointIndex p : subset) {
      const double v = lens.at(static_cast<std::size_t>(p), k);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    box.lo.push_back(mn);
    box.hi.push_back(mx);
  }
  return box;
}

LensMap lens_from_spec(const PointCloud& pc, std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::ParseError, "lens spec must look like coord:0,1 or pca:2");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view args = spec.substr(colon + 1);
  std::vector<std::size_t> values;
  for (const std::string_view cell : split_cells(args)) {
    const std::string_view t = trim(cell);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw Error(ErrorKind::ParseError, "bad lens argument '" + std::string(cell) + "'");
    }
    values.push_back(v);
  }
  if (kind == "coord") return lens_coordinate(pc, values);
  if (kind == "pca") {
    if (values.size() != 1) throw Error(ErrorKind::ParseError, "pca takes a single dimension");
    return lens_pca(pc, values.front());
  }
  throw Error(ErrorKind::ParseError, "unknown lens kind '" + std::string(kind) + "'");
}

std::vector<Vec> parse_csv_rows(std::string_view text) {
  std::vector<Vec> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const auto cells = split_cells(line);
    Vec row;
    row.reserve(cells.size());
    double v = 0.0;
    if (first_content && !parse_double(cells.front(), v)) {
      first_content = false;  // header row
      continue;
    }
    first_content = false;
    for (const std::string_view cell : cells) {
      if (!parse_double(cell, v)) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_no) + ": non-numeric cell '" + std::string(trim(cell)) + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
    if (eol == text.size()) break;
  }
  return rows;
}

PointCloud parse_points_csv(std::string_view text) {
  auto rows = parse_csv_rows(text);
  if (rows.empty()) throw Error(ErrorKind::ParseError, "point CSV contains no rows");
  return PointCloud(rows);
}

PointCloud load_points_csv(const std::filesystem::path& path) {
  return parse_points_csv(read_text_file(path));
}

LensMap parse_lens_csv(std::string_view text, std::size_t expected_rows) {
  auto rows = parse_csv_rows(text);
  if (rows.size() != expected_rows) {
    throw Error(ErrorKind::LensSizeMismatch, "lens has " + std::to_string(rows.size()) +
                                                 " rows but the point cloud has " +
                                                 std::to_string(expected_rows));
  }
  if (rows.front().empty() || rows.front().size() > 2) {
    throw Error(ErrorKind::ParseError, "lens CSV must have 1 or 2 columns");
  }
  return LensMap(rows);
}

LensMap load_lens_csv(const std::filesystem::path& path, std::size_t expected_rows) {
  return parse_lens_csv(read_text_file(path), expected_rows);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failed for " + path.string());
  return ss.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace mm
