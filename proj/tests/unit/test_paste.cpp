#include <doctest.h>

#include <algorithm>
#include <map>

#include "cutpaste/paste.hpp"
#include "cutpaste/rng.hpp"
#include "helpers.hpp"

using namespace cutpaste;

namespace {

InstanceRecord pixel_instance(std::uint8_t class_id, float value, int bands = 1) {
  InstanceRecord rec;
  rec.class_id = class_id;
  rec.patch = Raster::filled(1, 1, bands, value);
  rec.mask = BinaryMask::filled(1, 1, 1);
  rec.pixel_count = 1;
  rec.source_bbox = BBox{0, 0, 1, 1};
  return rec;
}

InstanceRecord block_instance(std::uint8_t class_id, int h, int w, float value, int bands = 1) {
  InstanceRecord rec;
  rec.class_id = class_id;
  rec.patch = Raster::filled(h, w, bands, value);
  rec.mask = BinaryMask::filled(h, w, 1);
  rec.pixel_count = static_cast<std::uint64_t>(h) * w;
  rec.source_bbox = BBox{0, 0, h, w};
  return rec;
}

Sample uniform_sample(int h, int w, std::uint8_t cls, float value, int bands = 1) {
  return Sample(Raster::filled(h, w, bands, value), SemanticMask::filled(h, w, cls), "s", "a");
}

InstanceBank bank_with(std::vector<InstanceRecord> records, std::size_t class_count) {
  InstanceBank bank(ClassMap::numbered(class_count));
  for (auto& r : records) bank.add(std::move(r));
  return bank;
}

}  // namespace

TEST_CASE("single-instance bank always yields that instance") {
  const auto bank = bank_with({pixel_instance(0, 1.0f)}, 1);
  Rng rng(1, 2);
  for (int i = 0; i < 20; ++i) CHECK(sample_instance(bank, rng).id == "i00000001");
}

TEST_CASE("empty bank cannot be sampled") {
  const InstanceBank bank(ClassMap::numbered(2));
  Rng rng(1, 2);
  CHECK_THROWS(sample_instance(bank, rng));

  const Sample sample = uniform_sample(4, 4, 0, 0.0f);
  AugmentConfig config;
  config.n_paste = 1;
  CHECK_THROWS(augment_sample(sample, bank, config, derive_rng(1, 0, 0)));
}

TEST_CASE("classes are sampled uniformly regardless of instance counts") {
  // Class 0 holds 1 instance, class 1 holds 99; each class should still
  // be drawn about half the time.
  std::vector<InstanceRecord> records{pixel_instance(0, 1.0f)};
  for (int i = 0; i < 99; ++i) records.push_back(pixel_instance(1, 2.0f));
  const auto bank = bank_with(std::move(records), 2);

  Rng rng(2024, 7);
  int class0 = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (sample_instance(bank, rng).class_id == 0) ++class0;
  }
  const double freq = static_cast<double>(class0) / draws;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("disabled pre-paste transform is the identity") {
  Rng rng(3, 3);
  const auto rec = block_instance(1, 2, 3, 5.0f);
  CHECK(pre_paste_transform(rec, rng, false) == rec);
}

TEST_CASE("hflip swaps columns of mask and patch") {
  InstanceRecord rec;
  rec.class_id = 0;
  rec.patch = Raster(1, 2, 1, {10.0f, 20.0f});
  rec.mask = BinaryMask(1, 2, {1, 0});
  rec.pixel_count = 1;
  rec.source_bbox = BBox{0, 0, 1, 2};

  const InstanceRecord flipped = apply_transform(rec, Transform2D{true, false, 0});
  CHECK(flipped.mask.values() == std::vector<std::uint8_t>{0, 1});
  CHECK(flipped.patch.samples() == std::vector<float>{20.0f, 10.0f});
  CHECK(flipped.pixel_count == 1);
}

TEST_CASE("rot90 turns a column into a row and keeps counts") {
  InstanceRecord rec;
  rec.class_id = 0;
  rec.patch = Raster(2, 1, 1, {1.0f, 2.0f});
  rec.mask = BinaryMask(2, 1, {1, 0});
  rec.pixel_count = 1;
  rec.source_bbox = BBox{0, 0, 2, 1};

  const InstanceRecord turned = apply_transform(rec, Transform2D{false, false, 1});
  CHECK(turned.mask.height() == 1);
  CHECK(turned.mask.width() == 2);
  CHECK(turned.mask.count_set() == 1);
  CHECK(turned.pixel_count == 1);

  // Four quarter turns are the identity.
  CHECK(apply_transform(rec, Transform2D{false, false, 4}) == rec);
}

TEST_CASE("paste replaces exactly the masked pixels") {
  Sample sample = uniform_sample(3, 3, 0, 0.0f);
  paste_in_place(sample, pixel_instance(3, 42.0f), 0, 0);

  int changed_mask = 0, changed_image = 0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (sample.mask.at(r, c) != 0) ++changed_mask;
      if (sample.image.at(0, r, c) != 0.0f) ++changed_image;
    }
  }
  CHECK(changed_mask == 1);
  CHECK(changed_image == 1);
  CHECK(sample.mask.at(0, 0) == 3);
  CHECK(sample.image.at(0, 0, 0) == 42.0f);
}

TEST_CASE("later pastes overwrite earlier ones where masks intersect") {
  Sample sample = uniform_sample(4, 4, 0, 0.0f);
  paste_in_place(sample, block_instance(1, 2, 2, 10.0f), 0, 0);
  paste_in_place(sample, block_instance(2, 2, 2, 20.0f), 1, 1);

  CHECK(sample.mask.at(0, 0) == 1);
  CHECK(sample.mask.at(1, 1) == 2);  // overlap carries the later class
  CHECK(sample.image.at(0, 1, 1) == 20.0f);
  CHECK(sample.mask.at(2, 2) == 2);
}

TEST_CASE("false mask pixels inside the bbox are untouched") {
  InstanceRecord rec;
  rec.class_id = 1;
  rec.patch = Raster::filled(2, 2, 1, 9.0f);
  rec.mask = BinaryMask(2, 2, {1, 0, 0, 1});
  rec.pixel_count = 2;
  rec.source_bbox = BBox{0, 0, 2, 2};

  Sample sample = uniform_sample(2, 2, 0, 0.0f);
  paste_in_place(sample, rec, 0, 0);
  CHECK(sample.mask.values() == std::vector<std::uint8_t>{1, 0, 0, 1});
  CHECK(sample.image.at(0, 0, 1) == 0.0f);
  CHECK(sample.image.at(0, 0, 0) == 9.0f);
}

TEST_CASE("band mismatch and bad placement are rejected") {
  Sample sample = uniform_sample(3, 3, 0, 0.0f, 2);
  CHECK_THROWS(paste_in_place(sample, pixel_instance(0, 1.0f), 0, 0));  // 1 band vs 2

  Sample ok = uniform_sample(3, 3, 0, 0.0f, 1);
  CHECK_THROWS(paste_in_place(ok, block_instance(1, 2, 2, 1.0f), 2, 2));  // hangs over the edge
}

TEST_CASE("no-op augmentation returns the input sample") {
  const auto bank = bank_with({pixel_instance(0, 1.0f)}, 1);
  const Sample sample = uniform_sample(4, 4, 0, 7.0f);
  AugmentConfig config;  // n_paste = 0, post off
  const AugmentResult result = augment_sample(sample, bank, config, derive_rng(1, 0, 0));
  CHECK(result.sample == sample);
  CHECK(result.events.empty());
  CHECK_FALSE(result.post_applied);
}

TEST_CASE("augmentation is deterministic in the rng state") {
  Rng data_rng(10, 1);
  const Sample sample(testutil::random_raster(data_rng, 16, 16, 2),
                      SemanticMask::filled(16, 16, 0), "s", "a");
  std::vector<InstanceRecord> records;
  for (int i = 0; i < 5; ++i) {
    auto rec = block_instance(static_cast<std::uint8_t>(1 + i % 2), 2 + i % 3, 2, 5.0f * i);
    rec.patch = testutil::random_raster(data_rng, rec.mask.height(), rec.mask.width(), 2);
    records.push_back(std::move(rec));
  }
  const auto bank = bank_with(std::move(records), 3);

  AugmentConfig config;
  config.n_paste = 4;
  config.pre_paste_augment = true;
  config.post_augment = true;

  const auto a = augment_sample(sample, bank, config, derive_rng(9, 2, 5));
  const auto b = augment_sample(sample, bank, config, derive_rng(9, 2, 5));
  CHECK(a.sample == b.sample);
  CHECK(a.events == b.events);
  CHECK(a.post_transform == b.post_transform);

  const auto c = augment_sample(sample, bank, config, derive_rng(9, 2, 6));
  CHECK(a.sample != c.sample);
}

TEST_CASE("augmented masks only contain original or bank classes") {
  Rng data_rng(11, 1);
  const Sample sample(testutil::random_raster(data_rng, 12, 12, 1),
                      SemanticMask::filled(12, 12, 4), "s", "a");
  const auto bank = bank_with({pixel_instance(1, 1.0f), block_instance(2, 3, 3, 2.0f)}, 5);

  AugmentConfig config;
  config.n_paste = 10;
  config.post_augment = true;
  const auto result = augment_sample(sample, bank, config, derive_rng(3, 0, 0));
  for (std::uint8_t v : result.sample.mask.values()) {
    CHECK((v == 4 || v == 1 || v == 2));
  }
}

TEST_CASE("pixels outside pasted masks are conserved") {
  Rng data_rng(12, 1);
  std::vector<std::uint8_t> mask_values(256);
  for (auto& v : mask_values) {
    v = data_rng.next_double() < 0.1 ? kIgnoreClass : static_cast<std::uint8_t>(data_rng.bounded(3));
  }
  const Sample sample(testutil::random_raster(data_rng, 16, 16, 2),
                      SemanticMask(16, 16, std::move(mask_values)), "s", "a");

  const auto bank = bank_with({block_instance(1, 3, 4, 9.0f, 2), pixel_instance(0, 3.0f, 2)}, 2);
  AugmentConfig config;
  config.n_paste = 5;
  const auto result = augment_sample(sample, bank, config, derive_rng(4, 1, 2));

  // Union of pasted areas from the event log.
  std::vector<bool> covered(256, false);
  for (const auto& ev : result.events) {
    const InstanceRecord* rec = bank.find(ev.instance_id);
    REQUIRE(rec != nullptr);
    const InstanceRecord inst = apply_transform(*rec, ev.transform);
    for (int r = 0; r < inst.mask.height(); ++r) {
      for (int c = 0; c < inst.mask.width(); ++c) {
        if (inst.mask.at(r, c)) covered[static_cast<std::size_t>(ev.top + r) * 16 + ev.left + c] = true;
      }
    }
  }
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      if (covered[static_cast<std::size_t>(r) * 16 + c]) continue;
      CHECK(result.sample.mask.at(r, c) == sample.mask.at(r, c));
      for (int b = 0; b < 2; ++b) CHECK(result.sample.image.at(b, r, c) == sample.image.at(b, r, c));
    }
  }
}

TEST_CASE("post augmentation permutes pixels without changing their multiset") {
  Rng data_rng(13, 1);
  const Sample padded(testutil::random_raster(data_rng, 9, 7, 2),
                      SemanticMask(9, 7, std::vector<std::uint8_t>(63, 1)), "s", "a");

  const InstanceBank bank(ClassMap::numbered(2));
  AugmentConfig config;
  config.post_augment = true;

  auto pairs = [](const Sample& s) {
    std::vector<std::pair<std::vector<float>, std::uint8_t>> out;
    for (int r = 0; r < s.image.height(); ++r) {
      for (int c = 0; c < s.image.width(); ++c) {
        std::vector<float> px;
        for (int b = 0; b < s.image.bands(); ++b) px.push_back(s.image.at(b, r, c));
        out.push_back({std::move(px), s.mask.at(r, c)});
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  for (std::uint64_t i = 0; i < 8; ++i) {
    const auto result = augment_sample(padded, bank, config, derive_rng(5, 0, i));
    CHECK(pairs(result.sample) == pairs(padded));
  }
}

TEST_CASE("event log replays to the pre-post-augmentation sample") {
  Rng data_rng(14, 1);
  const Sample sample(testutil::random_raster(data_rng, 20, 20, 3),
                      SemanticMask::filled(20, 20, 0), "s", "a");
  std::vector<InstanceRecord> records;
  for (int i = 0; i < 6; ++i) {
    auto rec = block_instance(static_cast<std::uint8_t>(i % 3), 1 + i % 4, 2 + i % 3, 1.0f);
    rec.patch = testutil::random_raster(data_rng, rec.mask.height(), rec.mask.width(), 3);
    records.push_back(std::move(rec));
  }
  const auto bank = bank_with(std::move(records), 3);

  AugmentConfig config;
  config.n_paste = 12;
  config.pre_paste_augment = true;
  config.post_augment = false;  // replay reproduces the pre-post state

  const auto result = augment_sample(sample, bank, config, derive_rng(6, 3, 1));
  CHECK(replay_events(sample, bank, result.events) == result.sample);
}

TEST_CASE("class sampling passes a chi-square uniformity check") {
  // Chi-square with 2 dof at significance 0.001: critical value 13.8155.
  std::vector<InstanceRecord> records{pixel_instance(0, 1.0f)};
  for (int i = 0; i < 10; ++i) records.push_back(pixel_instance(1, 2.0f));
  for (int i = 0; i < 1000; ++i) records.push_back(pixel_instance(2, 3.0f));
  const auto bank = bank_with(std::move(records), 3);

  Rng rng(99, 99);
  const int draws = 10000;
  std::map<int, int> counts;
  for (int i = 0; i < draws; ++i) counts[sample_instance(bank, rng).class_id]++;

  const double expected = draws / 3.0;
  double chi2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = counts[c] - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 13.8155);
}

TEST_CASE("oversized instances are center-cropped to fit") {
  const auto big = block_instance(1, 10, 3, 5.0f);
  const auto cropped = center_crop_to_fit(big, 4, 4);
  CHECK(cropped.mask.height() == 4);
  CHECK(cropped.mask.width() == 3);
  CHECK(cropped.pixel_count == 12);

  const auto bank = bank_with({block_instance(1, 10, 10, 5.0f)}, 2);
  AugmentConfig config;
  config.n_paste = 3;
  const Sample small = uniform_sample(4, 4, 0, 0.0f);
  const auto result = augment_sample(small, bank, config, derive_rng(7, 0, 0));
  CHECK(result.sample.mask.values() == std::vector<std::uint8_t>(16, 1));
}

TEST_CASE("flip probability bounds are validated") {
  AugmentConfig config;
  config.flip_probability = 1.5;
  CHECK_THROWS(config.validate());
}
