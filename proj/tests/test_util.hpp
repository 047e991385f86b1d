#pragma once

#include "eegfair/records.hpp"
#include "eegfair/rng.hpp"

#include <Eigen/Dense>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("eegfair_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
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

 private:
  std::filesystem::path path_;
};

inline Eigen::MatrixXd random_matrix(eegfair::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

inline eegfair::SubjectRecord record(const std::string& id, const std::string& center, eegfair::Diagnosis dx,
                                     eegfair::Gender g, double age = 60.0) {
  eegfair::SubjectRecord r;
  r.subject_id = id;
  r.center = center;
  r.diagnosis = dx;
  r.gender = g;
  r.age_years = age;
  return r;
}

// n subjects per (center, diagnosis, gender) cell.
inline std::vector<eegfair::SubjectRecord> balanced_cohort(const std::vector<std::string>& centers, int n_per_cell,
                                                           eegfair::Rng& rng) {
  using namespace eegfair;
  std::vector<SubjectRecord> out;
  for (const auto& c : centers)
    for (auto dx : {Diagnosis::PD, Diagnosis::nonPD})
      for (auto g : {Gender::male, Gender::female})
        for (int i = 0; i < n_per_cell; ++i)
          out.push_back(record(c + "-" + std::to_string(out.size()), c, dx, g, 50.0 + 20.0 * rng.uniform()));
  return out;
}

}  // namespace testutil
