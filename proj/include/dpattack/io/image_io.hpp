#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>
#include <json.hpp>

#include "dpattack/core/tensor.hpp"
#include "dpattack/driver/benchmark.hpp"

namespace dpattack {

/// Raw tensor JSON: {"shape":[C,H,W],"data":[row-major floats]}.
inline nlohmann::json tensor_to_json(const Tensor& t) {
  return nlohmann::json{{"shape", {t.channels(), t.height(), t.width()}}, {"data", t.values()}};
}

inline Tensor tensor_from_json(const nlohmann::json& j) {
  try {
    const auto s = j.at("shape").get<std::vector<std::size_t>>();
    if (s.size() != 3) throw FormatError("tensor shape must have 3 entries");
    return Tensor(Shape{s[0], s[1], s[2]}, j.at("data").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tensor JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline Tensor load_tensor_json(const std::string& path) {
  try {
    return tensor_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// 8-bit PNG decoded to [0,1] by dividing by 255. Gray stays one channel,
/// everything else becomes RGB; alpha is dropped.
inline ImageTensor load_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw FormatError("cannot decode PNG '" + path + "': " + img.message);
  }
  const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const std::size_t C = gray ? 1 : 3, H = img.height, W = img.width;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw FormatError("cannot decode PNG '" + path + "': " + img.message);
  }
  Tensor t(Shape{C, H, W});
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      for (std::size_t c = 0; c < C; ++c) t(c, i, j) = buf[(i * W + j) * C + c] / 255.0;
    }
  }
  return ImageTensor(std::move(t));
}

inline void save_png(const ImageTensor& x, const std::string& path) {
  if (x.channels() != 1 && x.channels() != 3) {
    throw ChannelMismatch("PNG output needs 1 or 3 channels");
  }
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(x.width());
  img.height = static_cast<png_uint_32>(x.height());
  img.format = x.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const std::size_t C = x.channels(), H = x.height(), W = x.width();
  std::vector<png_byte> buf(C * H * W);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      for (std::size_t c = 0; c < C; ++c) {
        buf[(i * W + j) * C + c] = static_cast<png_byte>(std::lround(x(c, i, j) * 255.0));
      }
    }
  }
  if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr)) {
    throw WriteError("cannot write PNG '" + path + "': " + img.message);
  }
}

/// Loads a .png or raw tensor .json image.
inline ImageTensor load_image(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".png" || ext == ".PNG") return load_png(path);
  if (ext == ".json") return ImageTensor(load_tensor_json(path));
  throw FormatError("unsupported image file '" + path + "'");
}

/// Image directory: every .png/.json file in name order. An optional
/// labels.csv with lines "<file name>,<label>" supplies ground truth.
inline std::vector<LabeledImage> load_dataset_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw FormatError("'" + dir + "' is not a directory");
  std::map<std::string, int> labels;
  const fs::path csv = fs::path(dir) / "labels.csv";
  if (fs::exists(csv)) {
    std::istringstream is(read_file(csv.string()));
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const std::string name = line.substr(0, comma), value = line.substr(comma + 1);
      if (name == "file" || name == "image_id") continue;  // header
      try {
        labels[name] = std::stoi(value);
      } catch (const std::exception&) {
        throw FormatError("bad label line in labels.csv: '" + line + "'");
      }
    }
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".png" || ext == ".PNG" || ext == ".json")) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledImage> out;
  for (const auto& f : files) {
    LabeledImage item{load_image(f.string()), std::nullopt, f.filename().string()};
    if (auto it = labels.find(item.id); it != labels.end()) item.label = Label{it->second};
    out.push_back(std::move(item));
  }
  if (out.empty()) throw EmptyDataset("no images found in '" + dir + "'");
  return out;
}

}  // namespace dpattack
