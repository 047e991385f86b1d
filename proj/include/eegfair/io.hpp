#pragma once

#include "eegfair/records.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace eegfair {

inline constexpr const char* kMetadataHeader =
    "subject_id,center,diagnosis,gender,age_years,updrs3_score,updrs_version,duration_months";

// Metadata CSV. Empty cells are absent optionals. Errors name the offending
// row/column: MissingColumn, DuplicateSubject, InvalidEnum, InvalidArgument.
std::vector<SubjectRecord> load_metadata(const std::filesystem::path& path);
void save_metadata(const std::filesystem::path& path, const std::vector<SubjectRecord>& records);

// Feature CSV: `subject_id,<CHANNEL>_<band>,...`. Columns are returned in
// canonical key order whatever the file order. Unless allow_subset, all 203
// keys must be present (MissingColumn).
FeatureTable load_feature_table(const std::filesystem::path& path, bool allow_subset = false);

// Shortest round-trip decimal; load(save(t)) is bit-exact.
void save_feature_table(const std::filesystem::path& path, const FeatureTable& table);

// Epoch files: `<id>.json` sidecar plus a data file named in the sidecar,
// either raw float64 little-endian or CSV (one line per epoch x channel), laid
// out [n_epochs, n_channels, n_samples].
void save_epoch_set(const std::filesystem::path& dir, const EpochSet& epochs);
EpochSet load_epoch_set(const std::filesystem::path& sidecar);

// Sidecar paths in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_epoch_sidecars(const std::filesystem::path& dir);

std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace eegfair
