#pragma once

// PNG masks and PNG/JPEG source images. Masks are written as 8-bit
// single-channel grayscale, 255 for foreground and 0 for background.

#include <png.h>

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>

#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"

namespace trimask {

using Bytes = std::vector<std::uint8_t>;

enum class ImageFormat { kPng, kJpeg, kUnknown };

struct ImageSize {
  std::int64_t width = 0;
  std::int64_t height = 0;
};

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kOutputNotWritable, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

inline ImageFormat detect_format(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) return ImageFormat::kPng;
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return ImageFormat::kJpeg;
  }
  return ImageFormat::kUnknown;
}

inline const char* content_type(ImageFormat format) {
  switch (format) {
    case ImageFormat::kPng: return "image/png";
    case ImageFormat::kJpeg: return "image/jpeg";
    case ImageFormat::kUnknown: break;
  }
  return "application/octet-stream";
}

namespace detail {

// RAII over png_image; png_image_free is safe to call repeatedly.
class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof image_);
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() { return &image_; }
  png_image* operator->() { return &image_; }

  [[noreturn]] void fail(const char* what) {
    throw Error(ErrorCode::kMalformedImage, std::string(what) + ": " + image_.message);
  }

 private:
  png_image image_;
};

inline void begin_png_read(PngImage& img, std::span<const std::uint8_t> bytes) {
  if (detect_format(bytes) != ImageFormat::kPng) {
    throw Error(ErrorCode::kMalformedImage, "not a PNG stream");
  }
  if (!png_image_begin_read_from_memory(img.get(), bytes.data(), bytes.size())) {
    img.fail("PNG header");
  }
}

inline Bytes write_png(png_uint_32 width, png_uint_32 height, png_uint_32 format,
                       const std::uint8_t* pixels) {
  PngImage img;
  img->width = width;
  img->height = height;
  img->format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(img.get(), nullptr, &size, 0, pixels, 0, nullptr)) {
    img.fail("PNG encode");
  }
  Bytes out(size);
  if (!png_image_write_to_memory(img.get(), out.data(), &size, 0, pixels, 0, nullptr)) {
    img.fail("PNG encode");
  }
  out.resize(size);
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void jpeg_silent(j_common_ptr) {}

// Decodes to RGB (or only reads the header when `pixels` is null). All C++
// objects with destructors live outside the setjmp frame.
inline bool decode_jpeg(std::span<const std::uint8_t> bytes, ImageSize& size, Bytes* pixels,
                        std::string& message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.output_message = jpeg_silent;
  if (setjmp(err.jump)) {
    message = err.message;
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  size = {static_cast<std::int64_t>(cinfo.image_width),
          static_cast<std::int64_t>(cinfo.image_height)};
  if (pixels != nullptr) {
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
    pixels->resize(stride * cinfo.output_height);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = pixels->data() + stride * cinfo.output_scanline;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
  }
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace detail

/// Deterministic: identical masks always encode to identical bytes.
inline Bytes encode_png(const BinaryMask& mask) {
  if (mask.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot encode an empty mask");
  const auto cells = mask.cells();
  Bytes gray(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) gray[i] = cells[i] ? 255 : 0;
  return detail::write_png(static_cast<png_uint_32>(mask.width()),
                           static_cast<png_uint_32>(mask.height()), PNG_FORMAT_GRAY, gray.data());
}

/// Any PNG the library can convert to 8-bit gray is accepted. Without a
/// threshold only 0 and 255 are legal; with one, values above it map to 1.
inline BinaryMask decode_png(std::span<const std::uint8_t> bytes,
                             std::optional<int> threshold = std::nullopt) {
  detail::PngImage img;
  detail::begin_png_read(img, bytes);
  img->format = PNG_FORMAT_GRAY;
  Bytes gray(PNG_IMAGE_SIZE(*img.get()));
  if (!png_image_finish_read(img.get(), nullptr, gray.data(), 0, nullptr)) {
    img.fail("PNG decode");
  }
  for (auto& v : gray) {
    if (threshold) {
      v = v > *threshold ? 1 : 0;
    } else if (v == 255) {
      v = 1;
    } else if (v != 0) {
      throw Error(ErrorCode::kNotBinary,
                  "mask pixel value " + std::to_string(v) + " is neither 0 nor 255");
    }
  }
  return BinaryMask(img->width, img->height, std::move(gray));
}

inline Bytes encode_rgb_png(const RgbImage& image) {
  return detail::write_png(static_cast<png_uint_32>(image.width),
                           static_cast<png_uint_32>(image.height), PNG_FORMAT_RGB,
                           image.data.data());
}

/// Reads only the header of a PNG or JPEG.
inline ImageSize probe_image_size(std::span<const std::uint8_t> bytes) {
  switch (detect_format(bytes)) {
    case ImageFormat::kPng: {
      detail::PngImage img;
      detail::begin_png_read(img, bytes);
      return {static_cast<std::int64_t>(img->width), static_cast<std::int64_t>(img->height)};
    }
    case ImageFormat::kJpeg: {
      ImageSize size;
      std::string message;
      if (!detail::decode_jpeg(bytes, size, nullptr, message)) {
        throw Error(ErrorCode::kMalformedImage, "JPEG header: " + message);
      }
      return size;
    }
    case ImageFormat::kUnknown: break;
  }
  throw Error(ErrorCode::kMalformedImage, "unrecognised image format");
}

inline RgbImage decode_rgb(std::span<const std::uint8_t> bytes) {
  RgbImage out;
  switch (detect_format(bytes)) {
    case ImageFormat::kPng: {
      detail::PngImage img;
      detail::begin_png_read(img, bytes);
      img->format = PNG_FORMAT_RGB;
      out.data.resize(PNG_IMAGE_SIZE(*img.get()));
      if (!png_image_finish_read(img.get(), nullptr, out.data.data(), 0, nullptr)) {
        img.fail("PNG decode");
      }
      out.width = img->width;
      out.height = img->height;
      return out;
    }
    case ImageFormat::kJpeg: {
      ImageSize size;
      std::string message;
      if (!detail::decode_jpeg(bytes, size, &out.data, message)) {
        throw Error(ErrorCode::kMalformedImage, "JPEG decode: " + message);
      }
      out.width = size.width;
      out.height = size.height;
      return out;
    }
    case ImageFormat::kUnknown: break;
  }
  throw Error(ErrorCode::kMalformedImage, "unrecognised image format");
}

}  // namespace trimask
