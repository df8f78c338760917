#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqcli {

// Invalid configuration content; exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output; exit status 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat "section.key" -> text store over a fixed key set. List values are
// comma separated.
class Config {
public:
  Config(); // every key at its default

  void set(const std::string &key, const std::string &value);
  const std::string &text(const std::string &key) const;

  double number(const std::string &key) const;
  std::vector<double> numbers(const std::string &key) const;
  int integer(const std::string &key) const;
  std::vector<int> integers(const std::string &key) const;
  std::string word(const std::string &key) const; // lower-cased
  std::vector<std::string> words(const std::string &key) const;

  // Effective configuration in the INI form accepted by load_ini.
  std::string dump() const;

private:
  std::map<std::string, std::string> values_;
};

void load_ini(Config &cfg, const std::string &text, const std::string &source);
void load_json(Config &cfg, const std::string &text, const std::string &source);
// Chooses JSON for a .json extension or a leading '{', INI otherwise.
void load_file(Config &cfg, const std::string &path);
// "key=value".
void apply_assignment(Config &cfg, const std::string &assignment);

std::vector<std::string> recipe_names();
void apply_recipe(Config &cfg, const std::string &name);

} // namespace sqcli
