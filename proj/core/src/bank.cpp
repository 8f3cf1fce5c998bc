#include "cutpaste/bank.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cutpaste/formats.hpp"

namespace cutpaste {

namespace {

constexpr const char* kMarkerName = "_INCOMPLETE";
constexpr const char* kManifestName = "manifest.jsonl";
constexpr const char* kClassMapName = "classmap.json";
constexpr const char* kDataDir = "data";

std::string format_id(std::uint64_t n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "i%08" PRIu64, n);
  return buf;
}

nlohmann::ordered_json record_to_manifest_line(const InstanceRecord& rec) {
  return nlohmann::ordered_json{
      {"id", rec.id},
      {"class_id", rec.class_id},
      {"height", rec.mask.height()},
      {"width", rec.mask.width()},
      {"bands", rec.patch.bands()},
      {"pixel_count", rec.pixel_count},
      {"source_sample_id", rec.source_sample_id},
      {"bbox",
       {{"top", rec.source_bbox.top},
        {"left", rec.source_bbox.left},
        {"height", rec.source_bbox.height},
        {"width", rec.source_bbox.width}}},
  };
}

}  // namespace

InstanceBank::InstanceBank(ClassMap class_map) : class_map_(std::move(class_map)) {
  per_class_.resize(class_map_.class_count());
}

void InstanceBank::add(InstanceRecord record) {
  if (record.id.empty()) {
    do {
      record.id = format_id(next_id_++);
    } while (by_id_.contains(record.id));
  }
  validate_instance(record, class_map_.class_count());
  if (by_id_.contains(record.id)) {
    throw std::runtime_error("InstanceBank: duplicate instance id '" + record.id + "'");
  }
  auto& list = per_class_[record.class_id];
  by_id_.emplace(record.id, std::make_pair(record.class_id, list.size()));
  list.push_back(std::move(record));
  ++total_count_;
}

std::vector<std::uint8_t> InstanceBank::nonempty_classes() const {
  std::vector<std::uint8_t> out;
  for (std::size_t c = 0; c < per_class_.size(); ++c) {
    if (!per_class_[c].empty()) out.push_back(static_cast<std::uint8_t>(c));
  }
  return out;
}

const InstanceRecord* InstanceBank::find(const std::string& id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &per_class_[it->second.first][it->second.second];
}

std::vector<ClassBankStats> save_bank(const InstanceBank& bank, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory / kDataDir);

  const fs::path marker = directory / kMarkerName;
  write_file_text(marker, "");

  write_class_map(directory / kClassMapName, bank.class_map());

  std::ostringstream manifest;
  for (std::size_t c = 0; c < bank.class_count(); ++c) {
    for (const InstanceRecord& rec : bank.instances_of(static_cast<std::uint8_t>(c))) {
      write_file_bytes(directory / kDataDir / (rec.id + ".patch"), encode_raster(rec.patch));
      write_file_bytes(directory / kDataDir / (rec.id + ".mask"), encode_binary_mask(rec.mask));
      manifest << record_to_manifest_line(rec).dump() << "\n";
    }
  }
  write_file_text(directory / kManifestName, manifest.str());

  fs::remove(marker);
  return bank_stats(bank);
}

InstanceBank load_bank(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::exists(directory / kManifestName)) {
    throw std::runtime_error(directory.string() + ": not an instance bank (no manifest.jsonl)");
  }
  if (fs::exists(directory / kMarkerName)) {
    throw std::runtime_error(directory.string() + ": incomplete bank (a save was interrupted)");
  }

  InstanceBank bank(read_class_map(directory / kClassMapName));

  const std::string manifest = read_file_text(directory / kManifestName);
  std::istringstream lines(manifest);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json entry;
    try {
      entry = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(directory.string() + ": manifest.jsonl line " +
                               std::to_string(line_no) + ": invalid JSON: " + e.what());
    }

    InstanceRecord rec;
    try {
      rec.id = entry.at("id").get<std::string>();
      rec.class_id = entry.at("class_id").get<std::uint8_t>();
      rec.pixel_count = entry.at("pixel_count").get<std::uint64_t>();
      rec.source_sample_id = entry.at("source_sample_id").get<std::string>();
      const auto& bbox = entry.at("bbox");
      rec.source_bbox = BBox{bbox.at("top").get<int>(), bbox.at("left").get<int>(),
                             bbox.at("height").get<int>(), bbox.at("width").get<int>()};
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(directory.string() + ": manifest.jsonl line " +
                               std::to_string(line_no) + ": " + e.what());
    }

    const fs::path patch_path = directory / kDataDir / (rec.id + ".patch");
    const fs::path mask_path = directory / kDataDir / (rec.id + ".mask");
    if (!fs::exists(patch_path)) {
      throw std::runtime_error("instance " + rec.id + ": missing data blob " + patch_path.string());
    }
    if (!fs::exists(mask_path)) {
      throw std::runtime_error("instance " + rec.id + ": missing data blob " + mask_path.string());
    }
    rec.patch = decode_raster(read_file_bytes(patch_path), "instance " + rec.id + " (" + patch_path.string() + ")");
    rec.mask = decode_binary_mask(read_file_bytes(mask_path), "instance " + rec.id + " (" + mask_path.string() + ")");

    const int mh = entry.at("height").get<int>();
    const int mw = entry.at("width").get<int>();
    const int mb = entry.at("bands").get<int>();
    if (rec.patch.height() != mh || rec.patch.width() != mw || rec.patch.bands() != mb) {
      throw std::runtime_error("instance " + rec.id + ": blob dimensions " +
                               std::to_string(rec.patch.height()) + "x" + std::to_string(rec.patch.width()) +
                               "x" + std::to_string(rec.patch.bands()) + " disagree with manifest " +
                               std::to_string(mh) + "x" + std::to_string(mw) + "x" + std::to_string(mb));
    }
    bank.add(std::move(rec));  // validates the remaining invariants
  }
  return bank;
}

std::vector<ClassBankStats> bank_stats(const InstanceBank& bank) {
  std::vector<ClassBankStats> stats;
  stats.reserve(bank.class_count());
  for (std::size_t c = 0; c < bank.class_count(); ++c) {
    ClassBankStats s;
    s.class_id = static_cast<std::uint8_t>(c);
    const auto& list = bank.instances_of(static_cast<std::uint8_t>(c));
    s.instance_count = list.size();
    if (!list.empty()) {
      std::vector<std::uint64_t> sizes;
      sizes.reserve(list.size());
      for (const auto& rec : list) {
        sizes.push_back(rec.pixel_count);
        s.total_pixels += rec.pixel_count;
      }
      std::sort(sizes.begin(), sizes.end());
      s.min_pixels = sizes.front();
      s.max_pixels = sizes.back();
      s.median_pixels = sizes[(sizes.size() - 1) / 2];
    }
    stats.push_back(s);
  }
  return stats;
}

std::string bank_stats_to_json(const std::vector<ClassBankStats>& stats, const ClassMap& class_map) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  std::uint64_t total_instances = 0;
  for (const auto& s : stats) {
    total_instances += s.instance_count;
    per_class.push_back({
        {"class_id", s.class_id},
        {"name", class_map.name(s.class_id)},
        {"instance_count", s.instance_count},
        {"total_pixels", s.total_pixels},
        {"min_pixels", s.min_pixels},
        {"median_pixels", s.median_pixels},
        {"max_pixels", s.max_pixels},
    });
  }
  nlohmann::ordered_json doc{{"per_class", per_class}, {"total_instances", total_instances}};
  return doc.dump(2) + "\n";
}

}  // namespace cutpaste
