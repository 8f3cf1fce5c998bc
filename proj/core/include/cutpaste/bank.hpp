#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "cutpaste/extraction.hpp"
#include "cutpaste/types.hpp"

namespace cutpaste {

// Per-class collections of instance records. Immutable once filled;
// ordering within a class is the manifest order.
class InstanceBank {
 public:
  InstanceBank() = default;
  explicit InstanceBank(ClassMap class_map);

  // Validates the record; assigns the next sequential id ("i00000001", ...)
  // when record.id is empty. Duplicate ids are rejected.
  void add(InstanceRecord record);

  const ClassMap& class_map() const { return class_map_; }
  std::size_t class_count() const { return class_map_.class_count(); }

  const std::vector<InstanceRecord>& instances_of(std::uint8_t class_id) const {
    return per_class_.at(class_id);
  }
  std::size_t total_count() const { return total_count_; }

  // Class ids with at least one instance, ascending.
  std::vector<std::uint8_t> nonempty_classes() const;

  const InstanceRecord* find(const std::string& id) const;

  bool operator==(const InstanceBank& other) const {
    return class_map_ == other.class_map_ && per_class_ == other.per_class_;
  }

 private:
  ClassMap class_map_;
  std::vector<std::vector<InstanceRecord>> per_class_;
  std::unordered_map<std::string, std::pair<std::uint8_t, std::size_t>> by_id_;
  std::size_t total_count_ = 0;
  std::uint64_t next_id_ = 1;
};

struct ClassBankStats {
  std::uint8_t class_id = 0;
  std::uint64_t instance_count = 0;
  std::uint64_t total_pixels = 0;
  std::uint64_t min_pixels = 0;
  std::uint64_t median_pixels = 0;  // lower median
  std::uint64_t max_pixels = 0;
};

// Layout written under `directory`:
//   classmap.json
//   manifest.jsonl   one record per line, bank iteration order
//   data/<id>.patch  raster blob
//   data/<id>.mask   binary-mask blob
// An `_INCOMPLETE` marker exists while a save is in flight; load_bank
// rejects directories that still carry it. Saving needs exclusive access
// to the directory; concurrent writers are not coordinated.
std::vector<ClassBankStats> save_bank(const InstanceBank& bank, const std::filesystem::path& directory);

InstanceBank load_bank(const std::filesystem::path& directory);

std::vector<ClassBankStats> bank_stats(const InstanceBank& bank);

std::string bank_stats_to_json(const std::vector<ClassBankStats>& stats, const ClassMap& class_map);

}  // namespace cutpaste
