#pragma once

#include <stdexcept>
#include <string>

namespace gridauth {

// Base for every error raised by the library. Callers that only need a
// message can catch this; the service layer maps subclasses to statuses.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed caller input: bad username, digit out of range, bad coordinates.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

// Persistence failed; no partial record was left behind.
class StorageError : public Error {
public:
    using Error::Error;
};

// Ciphertext was tampered with or the wrong store key was used.
class AuthenticationError : public Error {
public:
    using Error::Error;
};

// The entropy source could not deliver bytes. Not recoverable.
class EntropyError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Network or protocol failure while talking to a remote service.
class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace gridauth
