#pragma once

#include <stdexcept>
#include <string>

namespace ncs {

/// Invalid configuration value. `field` names the offending entry using
/// dotted-path notation ("channel.drop_prob").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Real-time harness failure (socket setup, sync loss).
class RtError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The peer never answered during the initial sync window.
class HandshakeError : public RtError {
public:
    using RtError::RtError;
};

} // namespace ncs
