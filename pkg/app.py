import os
import sys

if __name__ == "__main__":
    # 确保可以从仓库根目录导入 ssreg
    script_dir = os.path.dirname(os.path.abspath(__file__))
    sys.path.insert(0, script_dir)

    from ssreg.api.cli import main

    sys.exit(main())
