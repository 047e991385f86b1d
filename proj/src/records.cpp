#include "eegfair/records.hpp"

#include "eegfair/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace eegfair {

std::string_view to_string(Diagnosis d) noexcept { return d == Diagnosis::PD ? "PD" : "nonPD"; }
std::string_view to_string(Gender g) noexcept { return g == Gender::male ? "male" : "female"; }
std::string_view to_string(UpdrsVersion v) noexcept { return v == UpdrsVersion::UPDRS ? "UPDRS" : "MDS_UPDRS"; }

Diagnosis parse_diagnosis(std::string_view s) {
  if (s == "PD") return Diagnosis::PD;
  if (s == "nonPD") return Diagnosis::nonPD;
  throw Error(ErrorKind::InvalidEnum, "diagnosis '" + std::string(s) + "' (expected PD|nonPD)");
}

Gender parse_gender(std::string_view s) {
  if (s == "male") return Gender::male;
  if (s == "female") return Gender::female;
  throw Error(ErrorKind::InvalidEnum, "gender '" + std::string(s) + "' (expected male|female)");
}

UpdrsVersion parse_updrs_version(std::string_view s) {
  if (s == "UPDRS") return UpdrsVersion::UPDRS;
  if (s == "MDS_UPDRS") return UpdrsVersion::MDS_UPDRS;
  throw Error(ErrorKind::InvalidEnum, "updrs_version '" + std::string(s) + "' (expected UPDRS|MDS_UPDRS)");
}

void validate_records(const std::vector<SubjectRecord>& records) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (r.subject_id.empty()) throw Error(ErrorKind::InvalidArgument, "empty subject_id");
    if (r.center.empty()) throw Error(ErrorKind::InvalidArgument, "subject " + r.subject_id + ": empty center");
    if (!seen.insert(r.subject_id).second)
      throw Error(ErrorKind::DuplicateSubject, "subject_id '" + r.subject_id + "' appears more than once");
    if (!std::isfinite(r.age_years) || r.age_years < 0)
      throw Error(ErrorKind::InvalidArgument, "subject " + r.subject_id + ": age_years must be a nonnegative number");
    const auto check_opt = [&](const std::optional<double>& v, const char* name) {
      if (!v) return;
      if (!std::isfinite(*v) || *v < 0)
        throw Error(ErrorKind::InvalidArgument, "subject " + r.subject_id + ": " + name + " must be nonnegative");
      if (!r.is_pd())
        throw Error(ErrorKind::InvalidArgument, "subject " + r.subject_id + ": nonPD subjects carry no " + name);
    };
    check_opt(r.updrs3_score, "updrs3_score");
    check_opt(r.duration_months, "duration_months");
  }
}

Eigen::VectorXi diagnosis_labels(const std::vector<SubjectRecord>& records) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) y[static_cast<Eigen::Index>(i)] = records[i].is_pd() ? 1 : 0;
  return y;
}

std::vector<std::size_t> subgroup_filter(const std::vector<SubjectRecord>& records, const SubgroupPredicate& pred) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (pred.matches(records[i])) out.push_back(i);
  return out;
}

std::vector<std::string> center_labels(const std::vector<SubjectRecord>& records) {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.center);
  return {s.begin(), s.end()};
}

std::optional<Eigen::Index> FeatureTable::column_of(const FeatureKey& key) const {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it == keys.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - keys.begin());
}

FeatureTable FeatureTable::select_subjects(const std::vector<std::size_t>& rows) const {
  FeatureTable out;
  out.keys = keys;
  out.subject_ids = select_rows(subject_ids, rows);
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

void FeatureTable::validate() const {
  if (static_cast<std::size_t>(values.rows()) != subject_ids.size())
    throw Error(ErrorKind::InvalidArgument, "feature table row count does not match subject count");
  if (static_cast<std::size_t>(values.cols()) != keys.size())
    throw Error(ErrorKind::InvalidArgument, "feature table column count does not match key count");
  std::unordered_set<std::size_t> key_seen;
  for (const auto& k : keys)
    if (!key_seen.insert(k.canonical_index()).second)
      throw Error(ErrorKind::InvalidArgument, "feature key " + k.name() + " appears more than once");
  std::unordered_set<std::string> id_seen;
  for (const auto& id : subject_ids)
    if (!id_seen.insert(id).second) throw Error(ErrorKind::DuplicateSubject, "subject_id '" + id + "' repeated");
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      if (!std::isfinite(values(i, j)))
        throw Error(ErrorKind::NonFiniteValue, "subject " + subject_ids[static_cast<std::size_t>(i)] + ", column " +
                                                   keys[static_cast<std::size_t>(j)].name());
}

std::vector<SubjectRecord> align_records(const std::vector<SubjectRecord>& records, const FeatureTable& table) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].subject_id, i);
  std::vector<SubjectRecord> out;
  out.reserve(table.subject_ids.size());
  for (const auto& id : table.subject_ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorKind::MissingColumn, "no metadata row for subject '" + id + "'");
    out.push_back(records[it->second]);
  }
  return out;
}

std::optional<Eigen::Index> EpochSet::row_of(Channel c) const {
  const auto it = std::find(channels.begin(), channels.end(), c);
  if (it == channels.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - channels.begin());
}

void EpochSet::validate() const {
  if (!(sampling_rate_hz > 0) || !std::isfinite(sampling_rate_hz))
    throw Error(ErrorKind::InvalidArgument, "subject " + subject_id + ": sampling rate must be positive");
  std::unordered_set<int> seen;
  for (auto c : channels)
    if (!seen.insert(static_cast<int>(c)).second)
      throw Error(ErrorKind::InvalidArgument,
                  "subject " + subject_id + ": channel " + std::string(channel_label(c)) + " repeated");
  const auto expected = static_cast<Eigen::Index>(std::lround(kEpochSeconds * sampling_rate_hz));
  for (std::size_t e = 0; e < data.size(); ++e) {
    const auto& m = data[e];
    if (m.rows() != static_cast<Eigen::Index>(channels.size()) || m.cols() != expected)
      throw Error(ErrorKind::InvalidArgument, "subject " + subject_id + ": epoch " + std::to_string(e) +
                                                  " has shape " + std::to_string(m.rows()) + "x" +
                                                  std::to_string(m.cols()) + ", expected " +
                                                  std::to_string(channels.size()) + "x" + std::to_string(expected));
    if (!m.allFinite())
      throw Error(ErrorKind::NonFiniteValue, "subject " + subject_id + ": epoch " + std::to_string(e));
  }
}

}  // namespace eegfair
