#pragma once

#include <stdexcept>
#include <string>

namespace padsteg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structural mismatch between fields (e.g. padding length vs payload length).
class StructuralError : public Error {
public:
    using Error::Error;
};

class TruncatedFrame : public Error {
public:
    using Error::Error;
};

class MalformedFrame : public Error {
public:
    using Error::Error;
};

// File-level format problems (pcap magic, link type, scenario syntax).
class FormatError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Bad configuration values (scenario, profile, CLI).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace padsteg
