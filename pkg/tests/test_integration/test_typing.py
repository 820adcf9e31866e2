import pathlib

file = pathlib.Path(__file__)
root_dir = file.parent.parent.parent
package_src = root_dir / "jamlab"


def test_py_typed_file_exists():
    assert (package_src / "py.typed").exists()
    assert (package_src / "py.typed").is_file()


def test_console_entry_point_declared():
    setup = (root_dir / "setup.py").read_text()
    assert "jamlab=jamlab.cli:main" in setup
