#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cutpaste/extraction.hpp"
#include "cutpaste/rng.hpp"
#include "cutpaste/types.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      path_ = base / ("cutpaste_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(i));
      if (!std::filesystem::exists(path_)) break;
    }
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Random dims in [1, max_side]; class ids below a random class count.
inline cutpaste::SemanticMask random_mask(cutpaste::Rng& rng, int max_side, int max_classes,
                                          double ignore_prob = 0.15) {
  const int h = 1 + static_cast<int>(rng.bounded(max_side));
  const int w = 1 + static_cast<int>(rng.bounded(max_side));
  const int classes = 1 + static_cast<int>(rng.bounded(max_classes));
  std::vector<std::uint8_t> values(static_cast<std::size_t>(h) * w);
  for (auto& v : values) {
    if (rng.next_double() < ignore_prob) {
      v = cutpaste::kIgnoreClass;
    } else {
      v = static_cast<std::uint8_t>(rng.bounded(classes));
    }
  }
  return cutpaste::SemanticMask(h, w, std::move(values));
}

inline cutpaste::Raster random_raster(cutpaste::Rng& rng, int h, int w, int bands) {
  std::vector<float> data(static_cast<std::size_t>(h) * w * bands);
  for (auto& v : data) v = static_cast<float>(rng.next_double() * 255.0);
  return cutpaste::Raster(h, w, bands, std::move(data));
}

// Independent connected-components oracle: explicit-stack flood fill,
// no shared code with the two-pass implementation.
struct OracleComponent {
  std::uint8_t class_id;
  std::set<std::pair<int, int>> pixels;
};

inline std::vector<OracleComponent> flood_fill_components(const cutpaste::SemanticMask& mask,
                                                          int connectivity) {
  const int h = mask.height();
  const int w = mask.width();
  std::vector<bool> visited(static_cast<std::size_t>(h) * w, false);
  std::vector<OracleComponent> out;

  for (int sr = 0; sr < h; ++sr) {
    for (int sc = 0; sc < w; ++sc) {
      const std::size_t sidx = static_cast<std::size_t>(sr) * w + sc;
      if (visited[sidx] || mask.at(sr, sc) == cutpaste::kIgnoreClass) continue;
      const std::uint8_t cls = mask.at(sr, sc);
      OracleComponent comp{cls, {}};
      std::vector<std::pair<int, int>> stack{{sr, sc}};
      visited[sidx] = true;
      while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        comp.pixels.insert({r, c});
        const int dr4[] = {-1, 1, 0, 0};
        const int dc4[] = {0, 0, -1, 1};
        const int dr8[] = {-1, 1, 0, 0, -1, -1, 1, 1};
        const int dc8[] = {0, 0, -1, 1, -1, 1, -1, 1};
        const int n = connectivity == 8 ? 8 : 4;
        const int* dr = connectivity == 8 ? dr8 : dr4;
        const int* dc = connectivity == 8 ? dc8 : dc4;
        for (int k = 0; k < n; ++k) {
          const int rr = r + dr[k];
          const int cc = c + dc[k];
          if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
          const std::size_t i = static_cast<std::size_t>(rr) * w + cc;
          if (visited[i] || mask.at(rr, cc) != cls) continue;
          visited[i] = true;
          stack.push_back({rr, cc});
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

// Label-free canonical form: components as (class, sorted pixel set),
// sorted by first pixel.
using CanonicalPartition = std::vector<std::pair<std::uint8_t, std::set<std::pair<int, int>>>>;

inline CanonicalPartition canonicalize(const std::vector<OracleComponent>& comps) {
  CanonicalPartition out;
  for (const auto& c : comps) out.push_back({c.class_id, c.pixels});
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return *a.second.begin() < *b.second.begin(); });
  return out;
}

inline CanonicalPartition canonicalize(const cutpaste::ComponentLabeling& labeling) {
  std::vector<OracleComponent> comps(labeling.components.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    comps[i].class_id = labeling.components[i].class_id;
  }
  for (int r = 0; r < labeling.height; ++r) {
    for (int c = 0; c < labeling.width; ++c) {
      const std::uint32_t id = labeling.at(r, c);
      if (id != 0) comps[id - 1].pixels.insert({r, c});
    }
  }
  return canonicalize(comps);
}

}  // namespace testutil
