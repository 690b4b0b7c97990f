#include "rlt/core/io.hpp"

#include <fstream>

#include "rlt/core/error.hpp"

namespace rlt {

namespace {

json geometry_json(const GridGeometry& g) {
  return {{"dim", g.dim}, {"origin", g.origin}, {"spacing", g.spacing}, {"shape", g.shape}};
}

GridGeometry geometry_from(const json& j) {
  try {
    GridGeometry g(j.at("origin").get<std::vector<double>>(), j.at("spacing").get<std::vector<double>>(),
                   j.at("shape").get<std::vector<std::int64_t>>());
    if (j.at("dim").get<int>() != g.dim) throw Error(ErrorKind::InvalidArgument, "dim does not match array lengths");
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed grid geometry: ") + e.what());
  }
}

}  // namespace

json to_json(const GridSet& s) {
  // Alternating zero/one counts over the row-major flattening, starting with zeros.
  const std::int64_t depth = s.geometry().depth();
  const std::int64_t total = s.geometry().column_count() * depth;
  std::vector<std::int64_t> rle;
  std::int64_t cursor = 0;
  std::int64_t pending_ones = 0;
  std::int64_t ones_end = 0;
  auto flush_ones = [&] {
    if (pending_ones > 0) {
      rle.push_back(pending_ones);
      pending_ones = 0;
    }
  };
  for (std::size_t slot = 0; slot < s.column_slots(); ++slot) {
    const std::int64_t base = s.column_id(slot) * depth;
    for (const Run& r : s.column_runs(slot)) {
      const std::int64_t lo = base + r.lo;
      const std::int64_t hi = base + r.hi;
      if (pending_ones > 0 && lo == ones_end) {
        pending_ones += hi - lo;
      } else {
        flush_ones();
        rle.push_back(lo - cursor);
        pending_ones = hi - lo;
      }
      ones_end = cursor = hi;
    }
  }
  flush_ones();
  if (cursor < total || rle.empty()) rle.push_back(total - cursor);
  json j = geometry_json(s.geometry());
  j["occupancy_rle"] = rle;
  return j;
}

GridSet grid_set_from_json(const json& j) {
  GridGeometry g = geometry_from(j);
  const std::int64_t depth = g.depth();
  const std::int64_t total = g.column_count() * depth;
  GridSetBuilder b(g);
  std::int64_t cursor = 0;
  bool ones = false;
  for (const auto& v : j.at("occupancy_rle")) {
    const auto n = v.get<std::int64_t>();
    if (n < 0 || cursor + n > total) throw Error(ErrorKind::InvalidArgument, "occupancy_rle overruns the shape");
    if (ones) {
      // Split the run at column boundaries.
      std::int64_t p = cursor;
      while (p < cursor + n) {
        const std::int64_t col = p / depth;
        const std::int64_t end = std::min(cursor + n, (col + 1) * depth);
        b.add(col, p - col * depth, end - col * depth);
        p = end;
      }
    }
    cursor += n;
    ones = !ones;
  }
  if (cursor != total) throw Error(ErrorKind::InvalidArgument, "occupancy_rle does not cover the shape");
  return b.build();
}

json to_json(const GridFunction& f) {
  json j = geometry_json(f.geometry());
  j["values"] = f.values();
  return j;
}

GridFunction grid_function_from_json(const json& j) {
  return GridFunction(geometry_from(j), j.at("values").get<std::vector<double>>());
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace rlt
