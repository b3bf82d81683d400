#include <ermakov/cli.hpp>

int main(int argc, char** argv)
{
    return ermakov::cli::main(argc, argv);
}
