#include <doctest.h>

#include "cutpaste/formats.hpp"
#include "cutpaste/rng.hpp"
#include "helpers.hpp"

using namespace cutpaste;

TEST_CASE("raster blobs round-trip for every dtype") {
  const Raster f32(2, 3, 2, {0.5f, -1.25f, 3.0f, 4.5f, 5.0f, 6.0f, 7.0f, 8.0f, 9.0f, 10.0f, 11.0f, 12.0f},
                   Dtype::F32);
  CHECK(decode_raster(encode_raster(f32), "t") == f32);

  const Raster u8(1, 2, 1, {0.0f, 255.0f}, Dtype::U8);
  CHECK(decode_raster(encode_raster(u8), "t") == u8);

  const Raster u16(1, 2, 1, {65535.0f, 12.0f}, Dtype::U16);
  CHECK(decode_raster(encode_raster(u16), "t") == u16);
}

TEST_CASE("integer dtypes reject unrepresentable samples") {
  CHECK_THROWS(encode_raster(Raster(1, 1, 1, {0.5f}, Dtype::U8)));
  CHECK_THROWS(encode_raster(Raster(1, 1, 1, {256.0f}, Dtype::U8)));
  CHECK_THROWS(encode_raster(Raster(1, 1, 1, {-1.0f}, Dtype::U16)));
  CHECK_THROWS(encode_raster(Raster(1, 1, 1, {70000.0f}, Dtype::U16)));
}

TEST_CASE("raster decode rejects malformed blobs") {
  auto bytes = encode_raster(Raster::filled(2, 2, 1, 7.0f));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_raster(bad_magic, "blob"), doctest::Contains("invalid magic"),
                       std::runtime_error);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 1);
  CHECK_THROWS(decode_raster(truncated, "blob"));

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_WITH_AS(decode_raster(trailing, "blob"), doctest::Contains("trailing"),
                       std::runtime_error);

  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK_THROWS(decode_raster(bad_version, "blob"));

  auto bad_dtype = bytes;
  bad_dtype[5] = 7;
  CHECK_THROWS(decode_raster(bad_dtype, "blob"));
}

TEST_CASE("mask blobs round-trip and reject junk") {
  const BinaryMask mask(2, 3, {1, 0, 1, 1, 0, 0});
  CHECK(decode_binary_mask(encode_binary_mask(mask), "t") == mask);

  auto bytes = encode_binary_mask(mask);
  bytes[13] = 2;  // first value byte
  CHECK_THROWS(decode_binary_mask(bytes, "t"));

  const SemanticMask sem(2, 2, {0, 5, kIgnoreClass, 1});
  CHECK(decode_semantic_mask(encode_semantic_mask(sem), "t") == sem);
}

TEST_CASE("file round-trips through disk") {
  testutil::TempDir dir("formats");
  Rng rng(3, 3);
  const Raster raster = testutil::random_raster(rng, 5, 4, 3);
  write_raster(dir / "a.image", raster);
  CHECK(read_raster(dir / "a.image") == raster);

  const SemanticMask mask = testutil::random_mask(rng, 8, 4);
  write_semantic_mask(dir / "a.mask", mask);
  CHECK(read_semantic_mask(dir / "a.mask") == mask);

  CHECK_THROWS(read_raster(dir / "missing.image"));
}

TEST_CASE("class map json round-trips and validates") {
  testutil::TempDir dir("classmap");
  const ClassMap cm({"impervious", "agriculture", "forest"});
  write_class_map(dir / "classmap.json", cm);
  CHECK(read_class_map(dir / "classmap.json") == cm);

  write_file_text(dir / "bad.json", R"({"classes": [{"id": 0, "name": "a"}, {"id": 2, "name": "b"}]})");
  CHECK_THROWS(read_class_map(dir / "bad.json"));
  write_file_text(dir / "dup.json", R"({"classes": [{"id": 0, "name": "a"}, {"id": 0, "name": "b"}]})");
  CHECK_THROWS(read_class_map(dir / "dup.json"));
  write_file_text(dir / "junk.json", "not json");
  CHECK_THROWS(read_class_map(dir / "junk.json"));
}
