#include <iostream>

#include "qstock/cli.hpp"

int main(int argc, char **argv)
{
  return qstock::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
