#include "rkhs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "rkhs/errors.hpp"

namespace rkhs {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, std::size_t line, const char* what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw schema_error(fmt::format("invalid {} '{}'", what, text), line);
  }
  return v;
}

long parse_int(const std::string& text, std::size_t line, const char* what) {
  long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw schema_error(fmt::format("invalid {} '{}'", what, text), line);
  }
  return v;
}

// Yields (line number, content) for every non-empty, non-comment line.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& out) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      raw = trim(raw);
      if (raw.empty() || raw.front() == '#') continue;
      out = raw;
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

int read_dim_header(LineReader& reader) {
  std::string line;
  if (!reader.next(line)) throw schema_error("empty file: expected header 'dim,d'", reader.line());
  const auto fields = split(line);
  if (fields.size() != 2 || fields[0] != "dim") {
    throw schema_error(fmt::format("expected header 'dim,d', got '{}'", line), reader.line());
  }
  const long d = parse_int(fields[1], reader.line(), "dimension");
  if (d < 1) throw schema_error("dimension must be >= 1", reader.line());
  return static_cast<int>(d);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot open input file " + path.string());
  return in;
}

}  // namespace

SampleSet read_samples_csv(std::istream& in) {
  LineReader reader(in);
  SampleSet samples;
  samples.dim = read_dim_header(reader);
  const auto d = static_cast<std::size_t>(samples.dim);
  std::map<long, std::vector<std::vector<double>>> rows;
  std::map<long, std::size_t> first_line;
  std::string line;
  while (reader.next(line)) {
    const auto fields = split(line);
    if (fields.size() != d + 2) {
      throw schema_error(fmt::format("expected {} fields (level,x_1..x_{},value), got {}", d + 2, d,
                                     fields.size()),
                         reader.line());
    }
    const long level = parse_int(fields[0], reader.line(), "level");
    if (level < 0) throw schema_error("level must be >= 0", reader.line());
    std::vector<double> row;
    for (std::size_t a = 0; a < d; ++a) row.push_back(parse_double(fields[a + 1], reader.line(), "coordinate"));
    row.push_back(parse_double(fields[d + 1], reader.line(), "value"));
    rows[level].push_back(std::move(row));
    first_line.emplace(level, reader.line());
  }
  if (rows.empty()) throw schema_error("no sample rows", reader.line());
  long expected = 0;
  for (const auto& [level, level_rows] : rows) {
    if (level != expected) {
      throw schema_error(fmt::format("levels must be 0..L-1 without gaps; level {} is missing", expected),
                         first_line[level]);
    }
    ++expected;
    Matrix pts(samples.dim, static_cast<Eigen::Index>(level_rows.size()));
    Vector vals(static_cast<Eigen::Index>(level_rows.size()));
    for (std::size_t j = 0; j < level_rows.size(); ++j) {
      for (std::size_t a = 0; a < d; ++a) pts(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) = level_rows[j][a];
      vals[static_cast<Eigen::Index>(j)] = level_rows[j][d];
    }
    samples.points.push_back(std::move(pts));
    samples.values.push_back(std::move(vals));
  }
  return samples;
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_samples_csv(in);
}

void write_samples_csv(std::ostream& out, const std::vector<PointSet>& levels,
                       const std::vector<Vector>& values) {
  if (levels.empty() || levels.size() != values.size()) {
    throw invalid_argument("write_samples_csv: need one value vector per level");
  }
  out << "dim," << levels.front().dim() << '\n';
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t i = 0; i < levels[l].size(); ++i) {
      out << l;
      for (int a = 0; a < levels[l].dim(); ++a) {
        out << ',' << fmt::format("{:.17g}", levels[l].points()(a, static_cast<Eigen::Index>(i)));
      }
      out << ',' << fmt::format("{:.17g}", values[l][static_cast<Eigen::Index>(i)]) << '\n';
    }
  }
}

BoxDomain bounding_box(const SampleSet& samples) {
  Vector lo = Vector::Constant(samples.dim, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const auto& pts : samples.points) {
    lo = lo.cwiseMin(pts.rowwise().minCoeff());
    hi = hi.cwiseMax(pts.rowwise().maxCoeff());
  }
  for (int a = 0; a < samples.dim; ++a) {
    if (!(lo[a] < hi[a])) {
      throw invalid_argument(fmt::format(
          "samples do not span axis {}: pass an explicit domain", a));
    }
  }
  return BoxDomain(lo, hi);
}

std::vector<PointSet> sample_levels(const SampleSet& samples, const BoxDomain& domain) {
  std::vector<PointSet> levels;
  for (std::size_t l = 0; l < samples.num_levels(); ++l) {
    try {
      levels.emplace_back(samples.points[l], domain);
    } catch (const invalid_argument& e) {
      throw invalid_argument(fmt::format("sample level {}: {}", l, e.what()));
    }
  }
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    std::vector<std::size_t> where;
    try {
      where = embed(levels[l], levels[l + 1]);
    } catch (const invalid_argument& e) {
      throw invalid_argument(fmt::format("sample levels are not nested: level {} vs {}: {}", l, l + 1, e.what()));
    }
    for (std::size_t i = 0; i < where.size(); ++i) {
      const double coarse = samples.values[l][static_cast<Eigen::Index>(i)];
      const double fine = samples.values[l + 1][static_cast<Eigen::Index>(where[i])];
      if (coarse != fine) {
        throw invalid_argument(fmt::format(
            "sample level {} point {} has value {} but {} on level {}", l, i, coarse, fine, l + 1));
      }
    }
  }
  return levels;
}

Holdout read_holdout_csv(std::istream& in) {
  LineReader reader(in);
  const int dim = read_dim_header(reader);
  const auto d = static_cast<std::size_t>(dim);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (reader.next(line)) {
    const auto fields = split(line);
    if (fields.size() != d + 1) {
      throw schema_error(fmt::format("expected {} fields (x_1..x_{},value), got {}", d + 1, d, fields.size()),
                         reader.line());
    }
    std::vector<double> row;
    for (std::size_t a = 0; a < d; ++a) row.push_back(parse_double(fields[a], reader.line(), "coordinate"));
    row.push_back(parse_double(fields[d], reader.line(), "value"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw schema_error("no holdout rows", reader.line());
  Holdout out{Matrix(dim, static_cast<Eigen::Index>(rows.size())), Vector(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t a = 0; a < d; ++a) out.points(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) = rows[j][a];
    out.values[static_cast<Eigen::Index>(j)] = rows[j][d];
  }
  return out;
}

Holdout read_holdout_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_holdout_csv(in);
}

void write_holdout_csv(std::ostream& out, const Matrix& points, const Vector& values) {
  out << "dim," << points.rows() << '\n';
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index a = 0; a < points.rows(); ++a) out << fmt::format("{:.17g},", points(a, j));
    out << fmt::format("{:.17g}", values[j]) << '\n';
  }
}

NormTrace read_trace_csv(std::istream& in, const KernelSpec& spec) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw schema_error("empty trace file", reader.line());
  if (split(line) != std::vector<std::string>{"level", "h", "norm_squared", "increment_norm", "num_points"}) {
    throw schema_error(
        fmt::format("expected header 'level,h,norm_squared,increment_norm,num_points', got '{}'", line),
        reader.line());
  }
  NormTrace trace{spec, true, {}, {}};
  while (reader.next(line)) {
    const auto fields = split(line);
    if (fields.size() != 5) {
      throw schema_error(fmt::format("expected 5 fields, got {}", fields.size()), reader.line());
    }
    const long level = parse_int(fields[0], reader.line(), "level");
    if (level != static_cast<long>(trace.levels.size())) {
      throw schema_error(fmt::format("expected level {}, got {}", trace.levels.size(), level), reader.line());
    }
    TraceLevel record;
    record.fill_distance = parse_double(fields[1], reader.line(), "fill distance");
    record.norm_squared = parse_double(fields[2], reader.line(), "norm_squared");
    if (!fields[3].empty()) record.increment_norm = parse_double(fields[3], reader.line(), "increment norm");
    const long points = parse_int(fields[4], reader.line(), "num_points");
    if (points < 0) throw schema_error("num_points must be >= 0", reader.line());
    record.num_points = static_cast<std::size_t>(points);
    if (level > 0 && !record.increment_norm) trace.nested = false;
    trace.levels.push_back(record);
  }
  if (trace.levels.empty()) throw schema_error("trace has no levels", reader.line());
  if (trace.levels.size() < 2) trace.nested = false;
  if (!trace.nested) {
    for (auto& level : trace.levels) level.increment_norm.reset();
  }
  try {
    trace.validate();
  } catch (const invalid_argument& e) {
    throw schema_error(e.what());
  }
  return trace;
}

NormTrace read_trace_csv(const std::filesystem::path& path, const KernelSpec& spec) {
  auto in = open_input(path);
  return read_trace_csv(in, spec);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_argument("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw invalid_argument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string config_header(const std::string& echo) {
  return echo.empty() ? std::string() : "# config: " + echo + "\n";
}

}  // namespace rkhs
