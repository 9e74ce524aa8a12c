#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "gpbench/transport.hpp"

#include <charconv>

namespace gpbench {

std::optional<ParsedUrl> parse_url(std::string_view url) {
    ParsedUrl out;
    const auto sep = url.find("://");
    if (sep == std::string_view::npos) return std::nullopt;
    out.scheme = std::string(url.substr(0, sep));
    if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
    std::string_view rest = url.substr(sep + 3);
    const auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    out.port = out.scheme == "https" ? 443 : 80;
    if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        const std::string_view port = authority.substr(colon + 1);
        int p = 0;
        const auto res = std::from_chars(port.data(), port.data() + port.size(), p);
        if (res.ec != std::errc{} || res.ptr != port.data() + port.size() || p <= 0 || p > 65535)
            return std::nullopt;
        out.port = p;
        authority = authority.substr(0, colon);
    }
    if (authority.empty() || authority.find_first_of(" @") != std::string_view::npos) return std::nullopt;
    out.host = std::string(authority);
    return out;
}

HttpResult HttplibTransport::post(const HttpRequest& request) {
    const auto url = parse_url(request.url);
    if (!url) return {0, {}, "malformed url"};
    httplib::Client client(url->scheme + "://" + url->host + ":" + std::to_string(url->port));
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
        if (k == "Content-Type")
            content_type = v;
        else
            headers.emplace(k, v);
    }
    auto res = client.Post(url->path, headers, request.body, content_type);
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
}

}  // namespace gpbench
