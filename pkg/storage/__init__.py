"""
文件格式模块
"""

from storage.tables import read_csv, read_json, write_csv, write_json
from storage.certificate import load_certificate, save_certificate
from storage.pointset_file import load_pointset, save_pointset
from storage.manifest import Manifest, file_digest

__all__ = [
    "read_csv", "read_json", "write_csv", "write_json", "load_certificate",
    "save_certificate", "load_pointset", "save_pointset", "Manifest", "file_digest",
]
