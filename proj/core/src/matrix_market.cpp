#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gsp/problems.hpp"

namespace gsp {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

enum class Symmetry { General, Symmetric, Skew };

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::InvalidInput, "write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SparseMatrix parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) parse_error(1, "empty file");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_error(lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") parse_error(lineno, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array") parse_error(lineno, "unknown format '" + format + "'");
  if (field == "complex" || field == "pattern")
    throw Error(ErrorCode::Unsupported, "line 1: unsupported field '" + field + "' (only real and integer)");
  if (field != "real" && field != "integer" && field != "double") parse_error(lineno, "unknown field '" + field + "'");
  Symmetry sym;
  if (symmetry == "general") sym = Symmetry::General;
  else if (symmetry == "symmetric") sym = Symmetry::Symmetric;
  else if (symmetry == "skew-symmetric") sym = Symmetry::Skew;
  else if (symmetry == "hermitian") throw Error(ErrorCode::Unsupported, "line 1: hermitian matrices are not supported");
  else parse_error(lineno, "unknown symmetry '" + symmetry + "'");

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) parse_error(lineno + 1, "missing size line");
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, nnz = -1;
  const bool coordinate = format == "coordinate";
  size_line >> rows >> cols;
  if (coordinate) size_line >> nnz;
  if (!size_line || rows < 0 || cols < 0 || (coordinate && nnz < 0)) parse_error(lineno, "malformed size line");
  if (sym != Symmetry::General && rows != cols) parse_error(lineno, "symmetric storage requires a square matrix");

  std::vector<Triplet> t;
  auto add = [&](Index i, Index j, double v) {
    t.push_back({i, j, v});
    if (i != j && sym == Symmetry::Symmetric) t.push_back({j, i, v});
    if (i != j && sym == Symmetry::Skew) t.push_back({j, i, -v});
  };

  if (coordinate) {
    t.reserve(static_cast<std::size_t>(nnz) * (sym == Symmetry::General ? 1 : 2));
    for (long long e = 0; e < nnz; ++e) {
      if (!next_data_line(line)) parse_error(lineno + 1, "expected " + std::to_string(nnz) + " entries, got " + std::to_string(e));
      std::istringstream entry(line);
      long long i = 0, j = 0;
      double v = 0.0;
      entry >> i >> j >> v;
      if (!entry) parse_error(lineno, "malformed entry");
      if (i < 1 || i > rows || j < 1 || j > cols) parse_error(lineno, "index out of bounds");
      if (sym != Symmetry::General && j > i) parse_error(lineno, "symmetric storage expects the lower triangle");
      add(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    }
  } else {
    for (long long j = 0; j < cols; ++j) {
      const long long start = sym == Symmetry::General ? 0 : (sym == Symmetry::Skew ? j + 1 : j);
      for (long long i = start; i < rows; ++i) {
        if (!next_data_line(line)) parse_error(lineno + 1, "too few array values");
        std::istringstream entry(line);
        double v = 0.0;
        entry >> v;
        if (!entry) parse_error(lineno, "malformed value");
        if (v != 0.0) add(static_cast<Index>(i), static_cast<Index>(j), v);
      }
    }
  }
  if (next_data_line(line)) parse_error(lineno, "unexpected trailing data");
  return SparseMatrix::from_triplets(static_cast<Index>(rows), static_cast<Index>(cols), std::move(t));
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  try {
    return parse_matrix_market(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse || e.code() == ErrorCode::Unsupported)
      throw Error(e.code(), path.string() + ": " + e.what());
    throw;
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + " " + std::to_string(a.nonzeros()) + "\n";
  for (const Triplet& e : a.triplets())
    out += std::to_string(e.row + 1) + " " + std::to_string(e.col + 1) + " " + format_double(e.value) + "\n";
  write_file(path, out);
}

Vector read_matrix_market_vector(const std::filesystem::path& path) {
  const SparseMatrix a = read_matrix_market(path);
  if (a.cols() != 1) throw Error(ErrorCode::Parse, path.string() + ": vector file must have one column");
  return a.to_dense().col(0);
}

void write_matrix_market_vector(const std::filesystem::path& path, const Vector& v) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(v.size()) + " 1\n";
  for (Index i = 0; i < v.size(); ++i) out += format_double(v[i]) + "\n";
  write_file(path, out);
}

}  // namespace gsp
