import subprocess
import sys
import os
import webbrowser
import threading

# Add current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from app.config import UI_HOST, UI_PORT


def open_browser(url: str):
    # Open the browser after a short delay to make sure the server is up
    import time
    time.sleep(2)
    webbrowser.open(url)


def launch_ui():
    url = f"http://{UI_HOST}:{UI_PORT}"
    threading.Thread(target=open_browser, args=(url,)).start()

    # Run Streamlit without auto-opening browser
    subprocess.run([
        sys.executable, "-m", "streamlit", "run", "app/main.py",
        "--server.address", UI_HOST,
        "--server.port", UI_PORT,
        "--server.headless", "true"
    ])


if __name__ == "__main__":
    if sys.argv[1:2] == ["ui"]:
        launch_ui()
    else:
        from app.cli import run
        sys.exit(run(sys.argv[1:]))
