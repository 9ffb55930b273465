#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blpk {

enum class ErrorCode {
  bad_magic,
  unsupported_version,
  invalid_header,
  invalid_metadata,
  metadata_checksum_mismatch,
  truncated_offsets,
  corrupt_frame,
  corrupt_block,
  chunk_too_large,
  checksum_mismatch,
  sink_not_seekable,
  no_append_space,
  append_to_partial_chunk,
  no_offsets,
  descriptor_mismatch,
  not_an_array_file,
  invalid_dtype,
  empty_samples,
  invalid_argument,
  io_error,
};

const char* error_code_name(ErrorCode code);

/// All library failures are reported as Error. `index()` carries the chunk
/// index for checksum_mismatch (-1 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

  Error(ErrorCode code, const std::string& msg, std::int64_t index)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::int64_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::int64_t index_ = -1;
};

}  // namespace blpk
