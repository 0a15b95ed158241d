#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrmt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or bad model files. Maps to CLI exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public DataError {
 public:
  DecodeError(const std::string& what, std::size_t byte_offset)
      : DataError(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class EmptyCorpusError : public DataError {
 public:
  using DataError::DataError;
};

class SizeError : public DataError {
 public:
  using DataError::DataError;
};

class AlignmentError : public DataError {
 public:
  AlignmentError(std::size_t src_len, std::size_t tgt_len)
      : DataError("cannot pair corpora of different lengths: source has " +
                  std::to_string(src_len) + " sentences, target has " +
                  std::to_string(tgt_len)),
        src_len_(src_len),
        tgt_len_(tgt_len) {}
  std::size_t source_length() const noexcept { return src_len_; }
  std::size_t target_length() const noexcept { return tgt_len_; }

 private:
  std::size_t src_len_;
  std::size_t tgt_len_;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class TrainingError : public DataError {
 public:
  using DataError::DataError;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

class LanguageMismatchError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class LoadError : public DataError {
 public:
  using DataError::DataError;
};

// Orchestration failures. Maps to CLI exit code 3.
class PipelineError : public Error {
 public:
  using Error::Error;
};

class StagePreconditionError : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

class SequencingError : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

class ResumeError : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

class ConfigMismatchError : public ResumeError {
 public:
  using ResumeError::ResumeError;
};

}  // namespace lrmt
