#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hvf/maze.hpp"
#include "hvf/raster.hpp"

namespace hvf {

inline uint64_t fnv1a64(const void* data, std::size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// One random-interaction episode. Frames are not stored: the rasterizer is
// deterministic, so states are re-rendered on demand.
struct Episode {
  WallLayout layout;
  Vec2 goal;
  std::vector<Vec2> positions;  // horizon + 1
  std::vector<Action> actions;  // horizon
};

struct InteractionDataset {
  uint64_t seed = 0;
  int horizon = 0;
  std::vector<Episode> episodes;

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.actions.size();
    return n;
  }

  MazeState state_at(std::size_t episode, std::size_t t) const {
    const Episode& e = episodes.at(episode);
    return MazeState{e.positions.at(t), e.goal, e.layout};
  }

  Frame frame_at(std::size_t episode, std::size_t t, const RasterConfig& cfg) const {
    return render(state_at(episode, t), cfg);
  }
};

namespace detail {

struct ByteSink {
  std::vector<unsigned char> bytes;
  void put(const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  template <class T>
  void put_pod(T v) {
    put(&v, sizeof v);
  }
};

struct ByteSource {
  const unsigned char* p;
  const unsigned char* end;
  void get(void* out, std::size_t n) {
    if (std::size_t(end - p) < n) throw std::runtime_error("dataset: truncated file");
    std::memcpy(out, p, n);
    p += n;
  }
  template <class T>
  T get_pod() {
    T v;
    get(&v, sizeof v);
    return v;
  }
};

inline void write_episode(ByteSink& s, const Episode& e) {
  s.put_pod<uint32_t>(uint32_t(e.layout.wall_x.size()));
  for (double x : e.layout.wall_x) s.put_pod(x);
  for (double y : e.layout.gap_center_y) s.put_pod(y);
  s.put_pod(e.layout.gap_half_width);
  s.put_pod(e.layout.wall_thickness);
  s.put_pod(e.goal.x);
  s.put_pod(e.goal.y);
  s.put_pod<uint32_t>(uint32_t(e.positions.size()));
  for (Vec2 p : e.positions) {
    s.put_pod(p.x);
    s.put_pod(p.y);
  }
  s.put_pod<uint32_t>(uint32_t(e.actions.size()));
  for (Action a : e.actions) {
    s.put_pod(a.delta.x);
    s.put_pod(a.delta.y);
  }
}

inline Episode read_episode(ByteSource& s) {
  Episode e;
  const uint32_t walls = s.get_pod<uint32_t>();
  e.layout.wall_x.resize(walls);
  e.layout.gap_center_y.resize(walls);
  for (auto& x : e.layout.wall_x) x = s.get_pod<double>();
  for (auto& y : e.layout.gap_center_y) y = s.get_pod<double>();
  e.layout.gap_half_width = s.get_pod<double>();
  e.layout.wall_thickness = s.get_pod<double>();
  e.goal.x = s.get_pod<double>();
  e.goal.y = s.get_pod<double>();
  e.positions.resize(s.get_pod<uint32_t>());
  for (auto& p : e.positions) {
    p.x = s.get_pod<double>();
    p.y = s.get_pod<double>();
  }
  e.actions.resize(s.get_pod<uint32_t>());
  for (auto& a : e.actions) {
    a.delta.x = s.get_pod<double>();
    a.delta.y = s.get_pod<double>();
  }
  return e;
}

inline std::vector<unsigned char> serialize_dataset(const InteractionDataset& d) {
  ByteSink s;
  s.put("HVFD", 4);
  s.put_pod<uint32_t>(1);  // format version
  s.put_pod<uint64_t>(d.seed);
  s.put_pod<uint32_t>(uint32_t(d.horizon));
  s.put_pod<uint32_t>(uint32_t(d.episodes.size()));
  for (const auto& e : d.episodes) write_episode(s, e);
  return s.bytes;
}

}  // namespace detail

inline uint64_t dataset_content_hash(const InteractionDataset& d) {
  const auto bytes = detail::serialize_dataset(d);
  return fnv1a64(bytes.data(), bytes.size());
}

inline void save_dataset(const InteractionDataset& d, const std::string& path) {
  const auto bytes = detail::serialize_dataset(d);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

inline InteractionDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  detail::ByteSource s{bytes.data(), bytes.data() + bytes.size()};
  char magic[4];
  s.get(magic, 4);
  if (std::memcmp(magic, "HVFD", 4) != 0)
    throw std::runtime_error("dataset: bad magic in " + path);
  if (s.get_pod<uint32_t>() != 1) throw std::runtime_error("dataset: unknown version");
  InteractionDataset d;
  d.seed = s.get_pod<uint64_t>();
  d.horizon = int(s.get_pod<uint32_t>());
  d.episodes.resize(s.get_pod<uint32_t>());
  for (auto& e : d.episodes) e = detail::read_episode(s);
  return d;
}

}  // namespace hvf
