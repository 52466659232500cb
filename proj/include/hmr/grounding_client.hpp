#pragma once

#include <stdexcept>
#include <string>

namespace hmr {

struct Timeout : std::runtime_error {
    explicit Timeout(const std::string& what) : std::runtime_error(what) {}
};
struct HttpStatus : std::runtime_error {
    HttpStatus(int status, const std::string& what) : std::runtime_error(what), status(status) {}
    int status;
};
struct ConnectionFailed : std::runtime_error {
    explicit ConnectionFailed(const std::string& what) : std::runtime_error(what) {}
};
struct MissingRecording : std::runtime_error {
    explicit MissingRecording(const std::string& what) : std::runtime_error(what) {}
};

struct GroundingRequest {
    std::string image_ref;   // stem keys replay recordings
    std::string instruction;
    std::string image_bytes;
    std::string media_type = "image/png";
    std::string format = "qwen-vl-tokens";
};

struct GroundingResponse {
    std::string raw_text;
    double latency_ms = 0.0;
    std::string source; // "live" | "replay"
    int attempts = 1;
};

struct EndpointConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/ground";
    int timeout_ms = 10000;
    int max_attempts = 3;
    int backoff_initial_ms = 100; // doubles per retry

    /// Applies HMR_GROUND_ENDPOINT ("host:port") and HMR_GROUND_TIMEOUT_MS.
    static EndpointConfig from_env();
    static EndpointConfig from_env(EndpointConfig base);
};

/// POSTs {"instruction", "image_b64", "media_type", "format"} and returns the
/// response's raw_text verbatim. Retries with exponential backoff on transport
/// errors and 5xx; throws Timeout / HttpStatus / ConnectionFailed.
GroundingResponse ground_live(const GroundingRequest& request, const EndpointConfig& config);

/// Serves `{image_ref stem}.txt` from the replay directory; deterministic,
/// latency 0. Throws MissingRecording naming the expected file.
GroundingResponse ground_replay(const GroundingRequest& request, const std::string& replay_dir);

} // namespace hmr
