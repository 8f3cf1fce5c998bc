#include <doctest.h>

#include <map>
#include <set>

#include "cutpaste/dataset.hpp"
#include "cutpaste/formats.hpp"
#include "cutpaste/rng.hpp"
#include "helpers.hpp"

using namespace cutpaste;

namespace {

// Writes a sample pair and returns a manifest row.
std::string put_sample(const testutil::TempDir& dir, const std::string& id, const std::string& aoi,
                       const SemanticMask& mask) {
  write_raster(dir / (id + ".image"), Raster::filled(mask.height(), mask.width(), 1, 1.0f));
  write_semantic_mask(dir / (id + ".mask"), mask);
  return id + "," + id + ".image," + id + ".mask," + aoi + ",2018-01-01\n";
}

constexpr const char* kHeader = "sample_id,image_path,mask_path,aoi_id,date\n";

}  // namespace

TEST_CASE("header-only manifest is empty") {
  testutil::TempDir dir("manifest_empty");
  write_file_text(dir / "m.csv", kHeader);
  CHECK(load_manifest(dir / "m.csv").empty());
}

TEST_CASE("manifest rows load in file order") {
  testutil::TempDir dir("manifest_order");
  std::string csv = kHeader;
  csv += put_sample(dir, "s1", "a1", SemanticMask::filled(2, 2, 0));
  csv += put_sample(dir, "s2", "a1", SemanticMask::filled(2, 2, 1));
  csv += put_sample(dir, "s3", "a2", SemanticMask::filled(2, 2, 0));
  write_file_text(dir / "m.csv", csv);

  const DatasetManifest manifest = load_manifest(dir / "m.csv");
  REQUIRE(manifest.size() == 3);
  CHECK(manifest.entries[0].sample_id == "s1");
  CHECK(manifest.entries[1].sample_id == "s2");
  CHECK(manifest.entries[2].sample_id == "s3");
  CHECK(manifest.entries[2].aoi_id == "a2");

  const Sample s = load_sample(manifest.entries[1]);
  CHECK(s.mask == SemanticMask::filled(2, 2, 1));
}

TEST_CASE("manifest errors name the offending row") {
  testutil::TempDir dir("manifest_bad");

  std::string dup = kHeader;
  dup += put_sample(dir, "s1", "a1", SemanticMask::filled(2, 2, 0));
  dup += "s1,s1.image,s1.mask,a1,2018-01-01\n";
  write_file_text(dir / "dup.csv", dup);
  CHECK_THROWS_WITH_AS(load_manifest(dir / "dup.csv"), doctest::Contains("row 3"), std::runtime_error);

  write_file_text(dir / "missing.csv", std::string(kHeader) + "sX,nope.image,nope.mask,a,2018-01-01\n");
  CHECK_THROWS_WITH_AS(load_manifest(dir / "missing.csv"), doctest::Contains("nope.image"),
                       std::runtime_error);

  write_file_text(dir / "short.csv", std::string(kHeader) + "only,three,fields\n");
  CHECK_THROWS_WITH_AS(load_manifest(dir / "short.csv"), doctest::Contains("row 2"), std::runtime_error);

  write_file_text(dir / "badheader.csv", "id,img\n");
  CHECK_THROWS(load_manifest(dir / "badheader.csv"));

  write_file_text(dir / "empty.csv", "");
  CHECK_THROWS(load_manifest(dir / "empty.csv"));
}

TEST_CASE("class histogram counts non-ignore pixels") {
  testutil::TempDir dir("hist");
  const SemanticMask mask(2, 2, {0, 0, 1, kIgnoreClass});
  std::string csv = kHeader;
  csv += put_sample(dir, "s1", "a1", mask);
  write_file_text(dir / "one.csv", csv);
  const ClassMap cm = ClassMap::numbered(2);

  const auto counts = class_histogram(load_manifest(dir / "one.csv"), cm);
  CHECK(counts == std::vector<std::uint64_t>{2, 1});

  csv += put_sample(dir, "s2", "a1", mask);
  write_file_text(dir / "two.csv", csv);
  CHECK(class_histogram(load_manifest(dir / "two.csv"), cm) == std::vector<std::uint64_t>{4, 2});

  std::string ign = kHeader;
  ign += put_sample(dir, "s9", "a1", SemanticMask::filled(3, 3, kIgnoreClass));
  write_file_text(dir / "ign.csv", ign);
  CHECK(class_histogram(load_manifest(dir / "ign.csv"), cm) == std::vector<std::uint64_t>{0, 0});

  // Thread count must not change the result.
  CHECK(class_histogram(load_manifest(dir / "two.csv"), cm, 4) ==
        class_histogram(load_manifest(dir / "two.csv"), cm, 1));
}

TEST_CASE("two full-coverage aois split one per side") {
  testutil::TempDir dir("split2");
  std::string csv = kHeader;
  csv += put_sample(dir, "s1", "aoiA", SemanticMask(1, 2, {0, 1}));
  csv += put_sample(dir, "s2", "aoiB", SemanticMask(1, 2, {0, 1}));
  write_file_text(dir / "m.csv", csv);

  const SplitResult split =
      split_dataset(load_manifest(dir / "m.csv"), ClassMap::numbered(2), 0.5, 7);
  CHECK(split.train_ids.size() == 1);
  CHECK(split.val_ids.size() == 1);
  CHECK(split.train_ids[0] != split.val_ids[0]);
  CHECK(split.train_class_pixels == std::vector<std::uint64_t>{1, 1});
  CHECK(split.val_class_pixels == std::vector<std::uint64_t>{1, 1});
}

TEST_CASE("class confined to one aoi makes the split infeasible") {
  testutil::TempDir dir("split_infeasible");
  std::string csv = kHeader;
  csv += put_sample(dir, "s1", "aoiA", SemanticMask(1, 2, {0, 1}));  // class 1 only here
  csv += put_sample(dir, "s2", "aoiB", SemanticMask(1, 2, {0, 0}));
  csv += put_sample(dir, "s3", "aoiC", SemanticMask(1, 2, {0, 0}));
  write_file_text(dir / "m.csv", csv);

  CHECK_THROWS_WITH_AS(
      split_dataset(load_manifest(dir / "m.csv"), ClassMap::numbered(2), 0.4, 7, 50),
      doctest::Contains("class 1"), std::runtime_error);
}

TEST_CASE("splits are deterministic in the seed") {
  testutil::TempDir dir("split_det");
  std::string csv = kHeader;
  Rng rng(31, 1);
  for (int a = 0; a < 6; ++a) {
    for (int s = 0; s < 2; ++s) {
      SemanticMask mask(2, 2, {0, 1, 2, static_cast<std::uint8_t>(rng.bounded(3))});
      csv += put_sample(dir, "s" + std::to_string(a) + "_" + std::to_string(s), "aoi" + std::to_string(a),
                        mask);
    }
  }
  write_file_text(dir / "m.csv", csv);
  const DatasetManifest manifest = load_manifest(dir / "m.csv");
  const ClassMap cm = ClassMap::numbered(3);

  const SplitResult a = split_dataset(manifest, cm, 0.3, 99);
  const SplitResult b = split_dataset(manifest, cm, 0.3, 99);
  CHECK(a.train_ids == b.train_ids);
  CHECK(a.val_ids == b.val_ids);

  // Different seeds explore different assignments (with 6 aois this has
  // to differ for at least one of a few seeds).
  bool any_different = false;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    if (split_dataset(manifest, cm, 0.3, seed).val_ids != a.val_ids) any_different = true;
  }
  CHECK(any_different);
}

TEST_CASE("random feasible manifests always satisfy the split invariants") {
  Rng rng(41, 1);
  for (int trial = 0; trial < 10; ++trial) {
    testutil::TempDir dir("split_fuzz");
    const int aois = 4 + static_cast<int>(rng.bounded(4));
    const int classes = 2 + static_cast<int>(rng.bounded(3));
    std::string csv = kHeader;
    std::map<std::string, std::string> aoi_of;
    int sample_counter = 0;
    for (int a = 0; a < aois; ++a) {
      const int samples = 1 + static_cast<int>(rng.bounded(3));
      for (int s = 0; s < samples; ++s) {
        // Every class in every aoi keeps the instance feasible.
        std::vector<std::uint8_t> values;
        for (int c = 0; c < classes; ++c) values.push_back(static_cast<std::uint8_t>(c));
        while (values.size() < 6) values.push_back(static_cast<std::uint8_t>(rng.bounded(classes)));
        const std::string id = "s" + std::to_string(sample_counter++);
        csv += put_sample(dir, id, "aoi" + std::to_string(a), SemanticMask(2, 3, values));
        aoi_of[id] = "aoi" + std::to_string(a);
      }
    }
    write_file_text(dir / "m.csv", csv);
    const DatasetManifest manifest = load_manifest(dir / "m.csv");
    const ClassMap cm = ClassMap::numbered(classes);

    const double val_fraction = 0.2 + 0.3 * rng.next_double();
    const SplitResult split = split_dataset(manifest, cm, val_fraction, rng.next_u64());

    // Disjoint ids covering everything.
    std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
    std::set<std::string> val(split.val_ids.begin(), split.val_ids.end());
    CHECK(train.size() + val.size() == manifest.size());
    for (const auto& id : val) CHECK(train.count(id) == 0);

    // No aoi spans both splits.
    std::set<std::string> train_aois, val_aois;
    for (const auto& id : train) train_aois.insert(aoi_of[id]);
    for (const auto& id : val) val_aois.insert(aoi_of[id]);
    for (const auto& a : val_aois) CHECK(train_aois.count(a) == 0);

    // Class coverage on both sides.
    for (int c = 0; c < classes; ++c) {
      CHECK(split.train_class_pixels[c] > 0);
      CHECK(split.val_class_pixels[c] > 0);
    }
  }
}

TEST_CASE("split argument validation") {
  testutil::TempDir dir("split_args");
  std::string csv = kHeader;
  csv += put_sample(dir, "s1", "a1", SemanticMask(1, 1, {0}));
  write_file_text(dir / "m.csv", csv);
  const DatasetManifest manifest = load_manifest(dir / "m.csv");
  const ClassMap cm = ClassMap::numbered(1);

  CHECK_THROWS(split_dataset(manifest, cm, 0.0, 1));
  CHECK_THROWS(split_dataset(manifest, cm, 1.0, 1));
  CHECK_THROWS(split_dataset(DatasetManifest{}, cm, 0.5, 1));
  CHECK_THROWS(split_dataset(manifest, cm, 0.5, 1));  // single aoi
}
