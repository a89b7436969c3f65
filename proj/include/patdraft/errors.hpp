#pragma once

#include <stdexcept>
#include <string>

namespace patdraft {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// document model
class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& what) : Error(what) {}
};
class EmptyDocument : public Error {
public:
  explicit EmptyDocument(const std::string& what) : Error(what) {}
};

// transports
class LlmTransportError : public Error {
public:
  explicit LlmTransportError(const std::string& what) : Error(what) {}
};
class TransportError : public Error {
public:
  explicit TransportError(const std::string& what) : Error(what) {}
};
class MalformedResponse : public Error {
public:
  explicit MalformedResponse(const std::string& what) : Error(what) {}
};
class EmbeddingTransportError : public Error {
public:
  explicit EmbeddingTransportError(const std::string& what) : Error(what) {}
};

// files
class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// matching / retrieval
class TooFewInventors : public Error {
public:
  explicit TooFewInventors(const std::string& what) : Error(what) {}
};
class EmptyCorpus : public Error {
public:
  explicit EmptyCorpus(const std::string& what) : Error(what) {}
};

// outlines
class OutlineSyntaxError : public Error {
public:
  explicit OutlineSyntaxError(const std::string& what) : Error(what) {}
};

// generation / evaluation
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};
class TooShort : public Error {
public:
  explicit TooShort(const std::string& what) : Error(what) {}
};
class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

// splits
class SizeError : public Error {
public:
  explicit SizeError(const std::string& what) : Error(what) {}
};

}  // namespace patdraft
