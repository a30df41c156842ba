#include <fstream>

#include "json.hpp"

#include "gsp/problems.hpp"

namespace gsp {

void write_bundle(const std::filesystem::path& dir, const SaddleSystem& sys, const std::optional<SpdPreconditioner>& n) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "M.mtx", sys.m());
  write_matrix_market(dir / "A.mtx", sys.a());
  write_matrix_market(dir / "C.mtx", sys.c());
  write_matrix_market_vector(dir / "b.mtx", sys.b());

  nlohmann::json j;
  j["M"] = "M.mtx";
  j["A"] = "A.mtx";
  j["C"] = "C.mtx";
  j["b"] = "b.mtx";
  j["symmetric"] = sys.symmetric();
  if (n) {
    write_matrix_market(dir / "N.mtx", SparseMatrix::from_dense(n->dense()));
    j["N"] = "N.mtx";
  }
  std::ofstream out(dir / "system.json");
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + (dir / "system.json").string());
  out << j.dump(2) << "\n";
}

Bundle read_bundle(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, manifest.string() + ": " + e.what());
  }
  const auto base = manifest.parent_path();
  auto file = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string())
      throw Error(ErrorCode::Parse, manifest.string() + ": missing string entry '" + key + "'");
    return base / j[key].get<std::string>();
  };

  SparseMatrix m = read_matrix_market(file("M"));
  SparseMatrix a = read_matrix_market(file("A"));
  SparseMatrix c = read_matrix_market(file("C"));
  Vector b = read_matrix_market_vector(file("b"));
  std::optional<SaddleSystem> sys;
  if (j.contains("symmetric")) {
    if (!j["symmetric"].is_boolean()) throw Error(ErrorCode::Parse, manifest.string() + ": 'symmetric' must be a boolean");
    sys = SaddleSystem::create(std::move(m), std::move(a), std::move(c), std::move(b), j["symmetric"].get<bool>());
  } else {
    sys = SaddleSystem::create(std::move(m), std::move(a), std::move(c), std::move(b));
  }
  std::optional<SpdPreconditioner> n;
  if (j.contains("N")) n = SpdPreconditioner::from_matrix(read_matrix_market(file("N")));
  return Bundle{std::move(*sys), std::move(n)};
}

}  // namespace gsp
