#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gpbench {

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::milliseconds timeout{60000};
};

struct HttpResult {
    int status = 0;     // 0: no HTTP response (connection failure, timeout)
    std::string body;
    std::string error;  // transport-level description when status == 0
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResult post(const HttpRequest& request) = 0;
};

struct ParsedUrl {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 0;
    std::string path;    // includes query string; "/" when absent
};

std::optional<ParsedUrl> parse_url(std::string_view url);

// cpp-httplib backed transport; HTTPS through OpenSSL.
class HttplibTransport : public HttpTransport {
public:
    HttpResult post(const HttpRequest& request) override;
};

}  // namespace gpbench
