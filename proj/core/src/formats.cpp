#include "cutpaste/formats.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace cutpaste {

namespace {

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

struct ByteReader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;
  const std::string& context;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) {
      throw std::runtime_error(context + ": truncated file (need " + std::to_string(n) +
                               " bytes at offset " + std::to_string(pos) + ")");
    }
  }
  std::uint8_t u8() {
    need(1);
    return bytes[pos++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes[pos]) |
                      static_cast<std::uint16_t>(bytes[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(bytes[pos]) |
                      static_cast<std::uint32_t>(bytes[pos + 1]) << 8 |
                      static_cast<std::uint32_t>(bytes[pos + 2]) << 16 |
                      static_cast<std::uint32_t>(bytes[pos + 3]) << 24;
    pos += 4;
    return v;
  }
  void expect_magic(const char m[4]) {
    need(4);
    if (std::memcmp(bytes.data() + pos, m, 4) != 0) {
      throw std::runtime_error(context + ": invalid magic, expected '" + std::string(m, 4) + "'");
    }
    pos += 4;
  }
  void expect_end() const {
    if (pos != bytes.size()) {
      throw std::runtime_error(context + ": " + std::to_string(bytes.size() - pos) +
                               " trailing bytes");
    }
  }
};

void check_version(std::uint8_t v, const std::string& context) {
  if (v != 1) {
    throw std::runtime_error(context + ": unsupported version " + std::to_string(int(v)));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_raster(const Raster& raster) {
  std::vector<std::uint8_t> out;
  const std::size_t n = raster.samples().size();
  const std::size_t elem = raster.dtype() == Dtype::U8 ? 1 : raster.dtype() == Dtype::U16 ? 2 : 4;
  out.reserve(16 + n * elem);
  out.insert(out.end(), {'M', 'S', 'R', 'A'});
  put_u8(out, 1);
  put_u8(out, static_cast<std::uint8_t>(raster.dtype()));
  put_u16(out, static_cast<std::uint16_t>(raster.bands()));
  put_u32(out, static_cast<std::uint32_t>(raster.height()));
  put_u32(out, static_cast<std::uint32_t>(raster.width()));
  for (float v : raster.samples()) {
    switch (raster.dtype()) {
      case Dtype::U8: {
        if (v < 0.0f || v > 255.0f || v != std::floor(v)) {
          throw std::runtime_error("encode_raster: sample " + std::to_string(v) +
                                   " not representable as u8");
        }
        put_u8(out, static_cast<std::uint8_t>(v));
        break;
      }
      case Dtype::U16: {
        if (v < 0.0f || v > 65535.0f || v != std::floor(v)) {
          throw std::runtime_error("encode_raster: sample " + std::to_string(v) +
                                   " not representable as u16");
        }
        put_u16(out, static_cast<std::uint16_t>(v));
        break;
      }
      case Dtype::F32:
        put_u32(out, std::bit_cast<std::uint32_t>(v));
        break;
    }
  }
  return out;
}

Raster decode_raster(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r{bytes, 0, context};
  r.expect_magic("MSRA");
  check_version(r.u8(), context);
  const std::uint8_t dtype_raw = r.u8();
  if (dtype_raw > 2) {
    throw std::runtime_error(context + ": unknown dtype " + std::to_string(int(dtype_raw)));
  }
  const Dtype dtype = static_cast<Dtype>(dtype_raw);
  const std::uint16_t bands = r.u16();
  const std::uint32_t height = r.u32();
  const std::uint32_t width = r.u32();
  if (bands == 0 || height == 0 || width == 0) {
    throw std::runtime_error(context + ": zero dimension in header");
  }
  const std::size_t n = std::size_t(bands) * height * width;
  std::vector<float> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (dtype) {
      case Dtype::U8:
        samples.push_back(static_cast<float>(r.u8()));
        break;
      case Dtype::U16:
        samples.push_back(static_cast<float>(r.u16()));
        break;
      case Dtype::F32: {
        const float v = std::bit_cast<float>(r.u32());
        if (!std::isfinite(v)) {
          throw std::runtime_error(context + ": non-finite sample at element " + std::to_string(i));
        }
        samples.push_back(v);
        break;
      }
    }
  }
  r.expect_end();
  return Raster(static_cast<int>(height), static_cast<int>(width), bands, std::move(samples), dtype);
}

std::vector<std::uint8_t> encode_binary_mask(const BinaryMask& mask) {
  std::vector<std::uint8_t> out;
  out.reserve(13 + mask.values().size());
  out.insert(out.end(), {'M', 'S', 'K', 'B'});
  put_u8(out, 1);
  put_u32(out, static_cast<std::uint32_t>(mask.height()));
  put_u32(out, static_cast<std::uint32_t>(mask.width()));
  out.insert(out.end(), mask.values().begin(), mask.values().end());
  return out;
}

BinaryMask decode_binary_mask(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r{bytes, 0, context};
  r.expect_magic("MSKB");
  check_version(r.u8(), context);
  const std::uint32_t height = r.u32();
  const std::uint32_t width = r.u32();
  const std::size_t n = std::size_t(height) * width;
  r.need(n);
  std::vector<std::uint8_t> values(bytes.begin() + r.pos, bytes.begin() + r.pos + n);
  r.pos += n;
  r.expect_end();
  for (std::uint8_t v : values) {
    if (v > 1) throw std::runtime_error(context + ": mask byte out of {0,1}");
  }
  return BinaryMask(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

std::vector<std::uint8_t> encode_semantic_mask(const SemanticMask& mask) {
  std::vector<std::uint8_t> out;
  out.reserve(13 + mask.values().size());
  out.insert(out.end(), {'M', 'S', 'K', 'L'});
  put_u8(out, 1);
  put_u32(out, static_cast<std::uint32_t>(mask.height()));
  put_u32(out, static_cast<std::uint32_t>(mask.width()));
  out.insert(out.end(), mask.values().begin(), mask.values().end());
  return out;
}

SemanticMask decode_semantic_mask(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r{bytes, 0, context};
  r.expect_magic("MSKL");
  check_version(r.u8(), context);
  const std::uint32_t height = r.u32();
  const std::uint32_t width = r.u32();
  const std::size_t n = std::size_t(height) * width;
  r.need(n);
  std::vector<std::uint8_t> values(bytes.begin() + r.pos, bytes.begin() + r.pos + n);
  r.pos += n;
  r.expect_end();
  return SemanticMask(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

void write_raster(const std::filesystem::path& path, const Raster& raster) {
  write_file_bytes(path, encode_raster(raster));
}

Raster read_raster(const std::filesystem::path& path) {
  return decode_raster(read_file_bytes(path), path.string());
}

void write_binary_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file_bytes(path, encode_binary_mask(mask));
}

BinaryMask read_binary_mask(const std::filesystem::path& path) {
  return decode_binary_mask(read_file_bytes(path), path.string());
}

void write_semantic_mask(const std::filesystem::path& path, const SemanticMask& mask) {
  write_file_bytes(path, encode_semantic_mask(mask));
}

SemanticMask read_semantic_mask(const std::filesystem::path& path) {
  return decode_semantic_mask(read_file_bytes(path), path.string());
}

void write_class_map(const std::filesystem::path& path, const ClassMap& class_map) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < class_map.class_count(); ++i) {
    classes.push_back({{"id", i}, {"name", class_map.name(i)}});
  }
  nlohmann::ordered_json doc{{"classes", classes}};
  write_file_text(path, doc.dump(2) + "\n");
}

ClassMap read_class_map(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.contains("classes") || !doc["classes"].is_array()) {
    throw std::runtime_error(path.string() + ": missing 'classes' array");
  }
  std::vector<std::string> names(doc["classes"].size());
  std::vector<bool> seen(doc["classes"].size(), false);
  for (const auto& entry : doc["classes"]) {
    if (!entry.contains("id") || !entry.contains("name")) {
      throw std::runtime_error(path.string() + ": class entry missing id or name");
    }
    const std::size_t id = entry["id"].get<std::size_t>();
    if (id >= names.size() || seen[id]) {
      throw std::runtime_error(path.string() + ": class ids must be exactly 0.." +
                               std::to_string(names.size() - 1));
    }
    names[id] = entry["name"].get<std::string>();
    seen[id] = true;
  }
  return ClassMap(std::move(names));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path.string() + ": cannot open for reading");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw std::runtime_error(path.string() + ": read failed");
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(path.string() + ": cannot open for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error(path.string() + ": write failed");
  }
}

std::string read_file_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path.string() + ": cannot open for reading");
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw std::runtime_error(path.string() + ": read failed");
  }
  return text;
}

void write_file_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(path.string() + ": cannot open for writing");
  }
  out << text;
  if (!out) {
    throw std::runtime_error(path.string() + ": write failed");
  }
}

}  // namespace cutpaste
