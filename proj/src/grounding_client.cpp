#include "hmr/grounding_client.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace hmr {
namespace {

const char kBase64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < bytes.size()) {
        uint32_t n = (uint8_t(bytes[i]) << 16) | (uint8_t(bytes[i + 1]) << 8) | uint8_t(bytes[i + 2]);
        out += kBase64Chars[(n >> 18) & 63];
        out += kBase64Chars[(n >> 12) & 63];
        out += kBase64Chars[(n >> 6) & 63];
        out += kBase64Chars[n & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        uint32_t n = uint8_t(bytes[i]) << 16;
        out += kBase64Chars[(n >> 18) & 63];
        out += kBase64Chars[(n >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        uint32_t n = (uint8_t(bytes[i]) << 16) | (uint8_t(bytes[i + 1]) << 8);
        out += kBase64Chars[(n >> 18) & 63];
        out += kBase64Chars[(n >> 12) & 63];
        out += kBase64Chars[(n >> 6) & 63];
        out += "=";
    }
    return out;
}

} // namespace

EndpointConfig EndpointConfig::from_env() { return from_env(EndpointConfig{}); }

EndpointConfig EndpointConfig::from_env(EndpointConfig base) {
    if (const char* ep = std::getenv("HMR_GROUND_ENDPOINT")) {
        std::string s(ep);
        auto colon = s.rfind(':');
        if (colon != std::string::npos) {
            base.host = s.substr(0, colon);
            base.port = std::stoi(s.substr(colon + 1));
        } else {
            base.host = s;
        }
    }
    if (const char* t = std::getenv("HMR_GROUND_TIMEOUT_MS")) base.timeout_ms = std::stoi(t);
    return base;
}

GroundingResponse ground_live(const GroundingRequest& request, const EndpointConfig& config) {
    if (request.instruction.empty()) throw std::invalid_argument("empty instruction");
    if (request.image_bytes.empty()) throw std::invalid_argument("empty image");

    nlohmann::json body{{"instruction", request.instruction},
                        {"image_b64", base64_encode(request.image_bytes)},
                        {"media_type", request.media_type},
                        {"format", request.format}};
    std::string payload = body.dump();

    auto start = std::chrono::steady_clock::now();
    std::string last_error;
    int backoff_ms = config.backoff_initial_ms;
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
        httplib::Client client(config.host, config.port);
        client.set_connection_timeout(0, config.timeout_ms * 1000);
        client.set_read_timeout(0, config.timeout_ms * 1000);
        client.set_write_timeout(0, config.timeout_ms * 1000);

        auto res = client.Post(config.path, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            GroundingResponse response;
            try {
                response.raw_text = nlohmann::json::parse(res->body).at("raw_text").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw HttpStatus(res->status, std::string("unparseable response body: ") + e.what());
            }
            response.latency_ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - start)
                                      .count();
            response.source = "live";
            response.attempts = attempt;
            return response;
        }

        bool retryable;
        if (res) {
            last_error = "HTTP status " + std::to_string(res->status);
            retryable = res->status >= 500;
            if (!retryable) throw HttpStatus(res->status, last_error);
        } else {
            auto err = res.error();
            last_error = httplib::to_string(err);
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write) {
                retryable = true;
            } else {
                throw ConnectionFailed("connection to " + config.host + ":" +
                                       std::to_string(config.port) + " failed: " + last_error);
            }
        }
        if (attempt == config.max_attempts) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
    }
    throw Timeout("grounding request failed after " + std::to_string(config.max_attempts) +
                  " attempts: " + last_error);
}

GroundingResponse ground_replay(const GroundingRequest& request, const std::string& replay_dir) {
    std::string stem = std::filesystem::path(request.image_ref).stem().string();
    std::filesystem::path file = std::filesystem::path(replay_dir) / (stem + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw MissingRecording(stem + ".txt");
    std::ostringstream body;
    body << in.rdbuf();

    GroundingResponse response;
    response.raw_text = body.str();
    response.latency_ms = 0.0;
    response.source = "replay";
    return response;
}

} // namespace hmr
