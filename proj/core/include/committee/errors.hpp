#pragma once

#include <stdexcept>
#include <string>

namespace committee {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violated a domain invariant (bad thresholds, score out of range...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

/// Base for failures reaching a model endpoint. what() names the endpoint.
class TransportError : public Error {
 public:
  TransportError(std::string endpoint, const std::string& message)
      : Error(endpoint + ": " + message), endpoint_(std::move(endpoint)) {}

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

class EndpointError : public TransportError {
 public:
  EndpointError(std::string endpoint, int status, const std::string& message)
      : TransportError(std::move(endpoint), message), status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

class ProtocolError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// No structured object could be extracted from a completion.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A structured object was found but a field is missing or mistyped.
class FieldError : public ParseError {
 public:
  using ParseError::ParseError;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class ScoreError : public Error {
 public:
  using Error::Error;
};

class AggregateError : public Error {
 public:
  using Error::Error;
};

}  // namespace committee
