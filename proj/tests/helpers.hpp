#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "oracles.hpp"
#include "tdaeeg/types.hpp"

namespace testutil {

inline tdaeeg::PointCloud to_cloud(const oracle::Points& p) {
  tdaeeg::PointCloud c;
  c.dim = p.empty() ? 0 : p.front().size();
  for (const auto& x : p) c.coords.insert(c.coords.end(), x.begin(), x.end());
  return c;
}

inline oracle::Points to_points(const tdaeeg::PointCloud& c) {
  oracle::Points p;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto s = c.point(i);
    p.emplace_back(s.begin(), s.end());
  }
  return p;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("tdaeeg_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
