#pragma once

#include "eegfair/channels.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eegfair {

enum class Diagnosis { PD, nonPD };
enum class Gender { male, female };
enum class UpdrsVersion { UPDRS, MDS_UPDRS };

std::string_view to_string(Diagnosis d) noexcept;
std::string_view to_string(Gender g) noexcept;
std::string_view to_string(UpdrsVersion v) noexcept;

// Throw InvalidEnum on unrecognised tokens.
Diagnosis parse_diagnosis(std::string_view s);
Gender parse_gender(std::string_view s);
UpdrsVersion parse_updrs_version(std::string_view s);

struct SubjectRecord {
  std::string subject_id;
  std::string center;
  Diagnosis diagnosis = Diagnosis::nonPD;
  Gender gender = Gender::male;
  double age_years = 0.0;
  std::optional<double> updrs3_score;
  UpdrsVersion updrs_version = UpdrsVersion::MDS_UPDRS;
  std::optional<double> duration_months;

  bool is_pd() const noexcept { return diagnosis == Diagnosis::PD; }
};

// Checks field-level invariants and cross-record id uniqueness. Throws
// InvalidArgument / DuplicateSubject. Calling it twice is a no-op.
void validate_records(const std::vector<SubjectRecord>& records);

// 1 for PD, 0 for nonPD.
Eigen::VectorXi diagnosis_labels(const std::vector<SubjectRecord>& records);

struct SubgroupPredicate {
  std::optional<Gender> gender;
  std::optional<Diagnosis> diagnosis;
  std::optional<std::string> center;

  bool matches(const SubjectRecord& r) const {
    return (!gender || r.gender == *gender) && (!diagnosis || r.diagnosis == *diagnosis) &&
           (!center || r.center == *center);
  }
};

// Indices of matching records, in input order.
std::vector<std::size_t> subgroup_filter(const std::vector<SubjectRecord>& records, const SubgroupPredicate& pred);

// Distinct center labels, sorted.
std::vector<std::string> center_labels(const std::vector<SubjectRecord>& records);

template <typename T>
std::vector<T> select_rows(const std::vector<T>& items, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(items[r]);
  return out;
}

// Subjects x feature keys. Values are log10 relative band power.
struct FeatureTable {
  std::vector<std::string> subject_ids;
  std::vector<FeatureKey> keys;
  Eigen::MatrixXd values;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }

  // Column of `key`, or nullopt.
  std::optional<Eigen::Index> column_of(const FeatureKey& key) const;

  FeatureTable select_subjects(const std::vector<std::size_t>& rows) const;

  // Throws InvalidArgument / NonFiniteValue / DuplicateSubject.
  void validate() const;
};

// Reorders `records` to follow `table.subject_ids`. Throws MissingColumn if a
// table subject has no metadata row.
std::vector<SubjectRecord> align_records(const std::vector<SubjectRecord>& records, const FeatureTable& table);

// Per-subject epochs: data[e] is an n_channels x n_samples block in microvolts.
struct EpochSet {
  std::string subject_id;
  double sampling_rate_hz = 0.0;
  std::vector<Channel> channels;
  std::vector<Eigen::MatrixXd> data;

  std::size_t n_epochs() const noexcept { return data.size(); }
  Eigen::Index n_samples() const noexcept { return data.empty() ? 0 : data.front().cols(); }
  std::optional<Eigen::Index> row_of(Channel c) const;

  // Throws InvalidArgument (bad shape, repeated channel) / NonFiniteValue.
  void validate() const;
};

inline constexpr double kEpochSeconds = 5.0;

}  // namespace eegfair
